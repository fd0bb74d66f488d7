import time
from fractions import Fraction

import pytest

from specring.identities import (CATALOG, GROUPS, PRINTED_LAMBDA4, MultiPoly, catalog, get_entry, lam,
                                 printed_lam4, verify_all, verify_identity)

ACCEPTANCE_NAMES = {"E7", "E9", "E10", "E11", "LAMBDA_NEG", "LAMBDA_INV", "LAMBDA_SINV", "SQ_FACTOR",
                    "ROOTSIGN_AVG", "E15_FINAL", "E17_FINAL", "IDEM_SHIFT", "FSQRT_SHIFT", "FACT_P",
                    "FSQRT_DECOMP", "KH_CLOSED", "LG_CLOSED"}


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_entry_verifies(entry):
    t0 = time.perf_counter()
    res = verify_identity(entry)
    assert res.verified, res.residuals
    assert time.perf_counter() - t0 < 1.0


def test_catalog_covers_required_entries():
    assert ACCEPTANCE_NAMES <= {e.name for e in CATALOG}
    assert sum(len(catalog(g)) for g in GROUPS) == len(CATALOG)


def test_lambda4_table_matches_scheme():
    a, b, c, d = (MultiPoly.var(v) for v in "abcd")
    assert printed_lam4(a, b, c, d) == lam(a, b, c, d)


def test_lambda3_display():
    a, b, c = (MultiPoly.var(v) for v in "abc")
    want = (1 + a + b + c - a * b + a * c - b * c + a * b * c) * Fraction(1, 4)
    assert lam(a, b, c) == want


def _mutated(key):
    table = dict(PRINTED_LAMBDA4)
    table[key] = -table[key]

    def impl(*args):
        return printed_lam4(*args, table=table) if len(args) == 4 else lam(*args)
    return impl


@pytest.mark.parametrize("key", sorted(PRINTED_LAMBDA4))
def test_mutation_breaks_catalog(key):
    assert not all(r.verified for r in verify_all(lam_impl=_mutated(key)))


def test_residual_returned_not_raised():
    broken = lambda *args: lam(*args) + MultiPoly.var("z") if len(args) == 2 else lam(*args)
    res = verify_identity(get_entry("E7"), broken)
    assert not res.verified and res.residuals


def test_multipoly_involution_reduction():
    F = MultiPoly.var("F", involutions={"F"})
    assert F * F == MultiPoly.const(1)
    assert MultiPoly.var("Q") * MultiPoly.var("Q") != MultiPoly.const(1)

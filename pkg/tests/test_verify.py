import json
import math
from fractions import Fraction

import numpy as np
import pytest

from plap.errors import NoBoundary, SpecOutOfRange
from plap.graphs import canonical_key, make_cycle, make_path, make_tadpole
from plap.spectral import SolverOptions
from plap.verify import (
    verify_cheeger_upper_bound,
    verify_fk_edges,
    verify_fk_p1,
    verify_fk_vertices,
    verify_lemma_head_max,
    verify_p_limit,
    verify_path_chain,
    verify_tadpole_comparison,
)


class TestFkVertices:
    def test_n4_p2(self):
        r = verify_fk_vertices(4, 2.0)
        assert r.passed
        assert r.claim == "thm-1.2"
        lams = [e["lambda"] for e in r.entries]
        assert lams == sorted(lams)
        assert lams[0] == pytest.approx(2 - math.sqrt(3), abs=1e-8)
        assert lams[1] == pytest.approx(1.0, abs=1e-8)
        assert lams[2] == pytest.approx(3.0, abs=1e-8)
        assert r.entries[0]["key"] == canonical_key(make_tadpole(4, 3)).hex()
        assert r.margin == pytest.approx(1.0 - (2 - math.sqrt(3)), abs=1e-7)

    def test_n5_p15(self):
        r = verify_fk_vertices(5, 1.5)
        assert r.passed
        assert r.entries[0]["key"] == canonical_key(make_tadpole(5, 3)).hex()

    def test_precondition(self):
        with pytest.raises(SpecOutOfRange):
            verify_fk_vertices(3, 2.0)
        with pytest.raises(SpecOutOfRange):
            verify_fk_vertices(9, 2.0)

    def test_unconverged_fails_report(self):
        opts = SolverOptions(p=2.0, max_iterations=2, random_starts=0,
                             tol_residual=1e-15)
        r = verify_fk_vertices(4, 2.0, opts)
        assert not r.passed
        assert any(not e["converged"] for e in r.entries)


class TestFkEdges:
    def test_m4_p2(self):
        r = verify_fk_edges(4, 2.0)
        assert r.passed
        assert r.claim == "thm-1.3"
        assert len(r.entries) == 4
        assert r.entries[0]["key"] == canonical_key(make_tadpole(4, 3)).hex()
        lams = {round(e["lambda"], 5) for e in r.entries}
        assert round(2 - math.sqrt(2), 5) in lams  # the 5-path competitor
        assert all(e["omega_bound_ok"] in (True, None) for e in r.entries)

    def test_precondition(self):
        with pytest.raises(SpecOutOfRange):
            verify_fk_edges(3, 2.0)


class TestFkP1:
    def test_m4(self):
        r = verify_fk_p1(4)
        assert r.passed
        eq = [e for e in r.entries if e["equality"]]
        assert len(eq) == 1
        assert eq[0]["key"] == canonical_key(make_tadpole(4, 3)).hex()

    def test_m6_equality_set(self):
        r = verify_fk_p1(6)
        assert r.passed
        eq_keys = {e["key"] for e in r.entries if e["equality"]}
        expected = {canonical_key(make_tadpole(6, i)).hex() for i in (3, 4, 5)}
        assert eq_keys == expected
        for e in r.entries:
            if e["equality"]:
                assert (e["h_num"], e["h_den"]) == (1, 5)

    def test_margin_is_exact(self):
        r = verify_fk_p1(5)
        assert isinstance(r.margin, Fraction)
        assert r.margin > 0

    def test_path_crosscheck_recorded(self):
        r = verify_fk_p1(6)
        rows = [e for e in r.entries if "path_variant_quoted" in e]
        assert len(rows) == 1
        row = rows[0]
        assert (row["h_num"], row["h_den"]) == (2, 5)
        assert row["path_variant_quoted"] == [1, 2]
        assert row["path_variant_agrees"] is False

    def test_precondition(self):
        with pytest.raises(SpecOutOfRange):
            verify_fk_p1(3)
        with pytest.raises(SpecOutOfRange):
            verify_fk_p1(10)


class TestLemmaHeadMax:
    def test_n5_i3_p2(self):
        r = verify_lemma_head_max(5, 3, 2.0)
        assert r.passed
        assert r.entries[0]["argmax"] in (0, 1)
        assert r.entries[0]["status"] == "pass"
        assert r.margin > 1e-8

    def test_n8_i5_p3(self):
        r = verify_lemma_head_max(8, 5, 3.0)
        assert r.passed
        assert r.entries[0]["argmax"] <= 3

    def test_precondition(self):
        with pytest.raises(SpecOutOfRange):
            verify_lemma_head_max(4, 4, 2.0)
        with pytest.raises(SpecOutOfRange):
            verify_lemma_head_max(11, 3, 2.0)


class TestTadpoleComparison:
    def test_n5_p2(self):
        r = verify_tadpole_comparison(5, 2.0)
        assert r.passed
        lam3 = r.entries[0]["lambda"]
        roots = np.roots([1.0, -6.0, 8.0, -1.0])
        target = min(x.real for x in roots if abs(x.imag) < 1e-12)
        assert lam3 == pytest.approx(target, abs=1e-8)
        assert r.margin > 0

    def test_n12_keys_use_labelled_encoding(self):
        r = verify_tadpole_comparison(12, 2.0)
        assert r.passed
        assert all(int(e["key"][:2], 16) == 12 for e in r.entries)

    def test_precondition(self):
        with pytest.raises(SpecOutOfRange):
            verify_tadpole_comparison(4, 2.0)


class TestPathChain:
    def test_n4_p2_values(self):
        r = verify_path_chain(4, 2.0)
        assert r.passed
        lams = [e["lambda"] for e in r.entries]
        assert lams[0] == pytest.approx(1.0, abs=1e-5)
        assert lams[1] == pytest.approx(0.58579, abs=1e-5)
        assert lams[2] == pytest.approx(0.26795, abs=1e-5)

    def test_n6_p3(self):
        r = verify_path_chain(6, 3.0)
        assert r.passed

    def test_precondition(self):
        with pytest.raises(SpecOutOfRange):
            verify_path_chain(3, 2.0)


class TestPLimit:
    def test_tadpole_6_3(self):
        r = verify_p_limit(make_tadpole(6, 3), [2.0, 1.5, 1.25, 1.1, 1.05])
        assert r.passed
        gaps = [e["gap"] for e in r.entries]
        assert gaps[-1] < 0.05
        assert gaps[-1] < gaps[0]
        assert (r.params["h_num"], r.params["h_den"]) == (1, 5)

    def test_path5(self):
        r = verify_p_limit(make_path(5), [2.0, 1.5, 1.2])
        assert r.passed
        assert (r.params["h_num"], r.params["h_den"]) == (2, 3)

    def test_no_boundary(self):
        with pytest.raises(NoBoundary):
            verify_p_limit(make_cycle(5), [2.0, 1.5])

    def test_bad_grid(self):
        g = make_tadpole(5, 3)
        with pytest.raises(SpecOutOfRange):
            verify_p_limit(g, [1.5, 2.0])
        with pytest.raises(SpecOutOfRange):
            verify_p_limit(g, [2.0, 1.0])
        with pytest.raises(SpecOutOfRange):
            verify_p_limit(g, [])


class TestCheegerUpperBound:
    def test_small(self):
        r = verify_cheeger_upper_bound(4, [1.5, 2.0])
        assert r.passed
        skipped = [e for e in r.entries if e.get("skipped")]
        assert len(skipped) == 1  # the 2-path has no interior
        star_rows = [e for e in r.entries
                     if e.get("h_num") == 3 and e.get("h_den") == 1]
        assert star_rows and all(
            e["lambda"] == pytest.approx(3.0, abs=1e-8) for e in star_rows)

    def test_precondition(self):
        with pytest.raises(SpecOutOfRange):
            verify_cheeger_upper_bound(8, [2.0])
        with pytest.raises(SpecOutOfRange):
            verify_cheeger_upper_bound(5, [])


class TestReportDeterminism:
    def test_same_seed_same_bytes(self):
        opts = SolverOptions(p=2.0, seed=7)
        a = verify_fk_vertices(5, 2.0, opts).to_json_bytes()
        b = verify_fk_vertices(5, 2.0, opts).to_json_bytes()
        assert a == b

    def test_parallel_same_bytes(self):
        opts = SolverOptions(p=1.5, seed=3)
        serial = verify_fk_vertices(5, 1.5, opts, workers=1).to_json_bytes()
        parallel = verify_fk_vertices(5, 1.5, opts, workers=3).to_json_bytes()
        assert serial == parallel

    def test_json_schema(self):
        r = verify_fk_vertices(4, 2.0)
        d = r.to_json_dict()
        assert list(d) == ["claim", "params", "pass", "margin", "entries", "solver"]
        assert list(d["solver"]) == ["p", "tol_residual", "tol_lambda_rel",
                                     "max_iterations", "random_starts", "seed"]
        parsed = json.loads(r.to_json_bytes().decode())
        assert parsed["pass"] is True

    def test_exact_margin_serialises_as_pair(self):
        d = verify_fk_p1(5).to_json_dict()
        assert isinstance(d["margin"], list) and len(d["margin"]) == 2

    def test_csv_shape(self):
        r = verify_fk_vertices(4, 2.0)
        lines = r.to_csv_text().strip().split("\n")
        assert lines[0] == "key,n,m,lambda,residual"
        assert len(lines) == 1 + len(r.entries)
        key, n, m, lam, res = lines[1].split(",")
        assert key == r.entries[0]["key"]
        assert float(lam) == r.entries[0]["lambda"]

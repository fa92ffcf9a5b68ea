import json

import numpy as np
import pytest

from hamdisc.cli import main
from hamdisc.fractional import FractionalMatching, solve_pfm
from hamdisc.hypergraph import Colouring
from hamdisc.instances import gen_complete, gen_near_perfect_extremal
from hamdisc.verify import DiscrepancyReport, VerificationError, verify_cycle, verify_matching, verify_pfm

from oracles import matchings_of_size


def test_cycle_reports():
    G = gen_complete(8, 3)
    rep = verify_cycle(G, Colouring.constant(G, 2), range(8))
    assert rep.surplus == 4 and rep.scaled == 8 and rep.m == 8
    cyc = list(range(8))
    windows = [tuple(sorted(cyc[(i + j) % 8] for j in range(3))) for i in range(8)]
    C = Colouring(G, 2, {e: (1 if e in windows[::2] else 0) for e in G.edges})
    assert verify_cycle(G, C, cyc).surplus == 0


def test_surplus_arithmetic():
    rep = DiscrepancyReport("cycle", 14, (10, 4), 0, 10 - 14 / 2)
    assert rep.surplus == 3 and rep.scaled == 6


def test_cycle_failures_name_the_window():
    G = gen_complete(6, 3).without([(3, 4, 5)])
    C = Colouring.constant(G, 2)
    with pytest.raises(VerificationError, match="window 3"):
        verify_cycle(G, C, range(6))
    with pytest.raises(VerificationError):
        verify_cycle(G, C, [0, 1, 2, 3, 4, 4])


def test_matching_checks():
    G = gen_complete(6, 3)
    C = Colouring.constant(G, 2)
    assert verify_matching(G, C, [(0, 1, 2), (3, 4, 5)]).m == 2
    with pytest.raises(VerificationError, match="share vertex 2") as exc:
        verify_matching(G, C, [(0, 1, 2), (2, 3, 4)])
    assert exc.value.witness == 2
    with pytest.raises(VerificationError):
        verify_matching(G, C, [(0, 1, 2)])
    assert verify_matching(G, C, [(0, 1, 2)], perfect=False).m == 1


def test_pfm_audit():
    G = gen_complete(6, 3)
    assert verify_pfm(solve_pfm(G, 0.1)) == (True, [])
    vals = np.full(20, 0.1)
    vals[G.edges.index((0, 1, 2))] = 0.09
    ok, problems = verify_pfm(FractionalMatching(G, vals, 0.1))
    assert not ok
    # vertices 0, 1, 2 all see the lowered edge
    assert sum("vertex" in p for p in problems) == 3


def test_extremal_small_case():
    G, C = gen_near_perfect_extremal(12)
    for size, t in ((4, 0), (3, 1)):
        worst = min(min(sum(C[e] == c for e in M) for c in (0, 1)) for M in matchings_of_size(G.edges, size))
        assert worst >= 12 / 6 - 2 * t


def test_cli_round_trip(tmp_path, capsys):
    inst, rep, cyc = tmp_path / "g.txt", tmp_path / "r.json", tmp_path / "c.txt"
    assert main(["gen", "--family", "split_colour", "--n", "18", "--seed", "1", "-o", str(inst)]) == 0
    assert main(["run", str(inst), "--seed", "1", "--report", str(rep), "--cycle", str(cyc),
                 "--dump-pfm", str(tmp_path / "x.csv"), "--dump-gadgets", str(tmp_path / "g.json"),
                 "--dump-bad", str(tmp_path / "b.json")]) == 0
    data = json.loads(rep.read_text())
    assert data["success"] and data["verified"]["m"] == 18
    assert json.loads((tmp_path / "b.json").read_text())["epsilon"] == 0.1
    assert main(["verify", str(inst), str(cyc)]) == 0
    vs = cyc.read_text().split()
    vs[0], vs[1] = vs[1], vs[0]
    vs[0] = vs[2]
    bad = tmp_path / "bad.txt"
    bad.write_text(" ".join(vs))
    assert main(["verify", str(inst), str(bad)]) == 1
    capsys.readouterr()
    assert main(["stats", str(rep)]) == 0
    assert "1/1" in capsys.readouterr().err


def test_cli_usage_errors(tmp_path):
    assert main(["run", "--bogus"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["run", str(tmp_path / "missing.txt")]) == 2


def test_cli_matching_kind(tmp_path):
    inst = tmp_path / "g.txt"
    main(["gen", "--family", "complete", "--n", "6", "--colouring", "mono", "-o", str(inst)])
    m = tmp_path / "m.txt"
    m.write_text("0 1 2\n3 4 5\n")
    assert main(["verify", str(inst), str(m), "--kind", "matching"]) == 0
    m.write_text("0 1 2\n2 4 5\n")
    assert main(["verify", str(inst), str(m), "--kind", "matching"]) == 1

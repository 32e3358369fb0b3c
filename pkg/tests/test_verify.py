import json
import math

import pytest

from nomakit import verify


@pytest.mark.parametrize("myth", sorted(verify.CHECKS))
@pytest.mark.parametrize("seed", [0, 1, 12345])
def test_every_check_confirms(myth, seed):
    rep = verify.CHECKS[myth](seed)
    failed = [e for e in rep.evidence if not e["ok"]]
    assert rep.verdict == verify.CONFIRMED, failed


@pytest.mark.parametrize("myth", sorted(verify.CHECKS))
def test_deterministic(myth):
    a = json.dumps(verify.CHECKS[myth](7).to_dict())
    b = json.dumps(verify.CHECKS[myth](7).to_dict())
    assert a == b


def test_report_schema():
    d = verify.check_myth3(0).to_dict()
    assert set(d) == {"myth", "verdict", "seed", "evidence"}
    assert all({"name", "ok"} <= set(e) for e in d["evidence"])


def test_evidence_recomputes_verdict():
    for rep in verify.run_checks(0):
        d = rep.to_dict()
        assert (d["verdict"] == verify.CONFIRMED) == all(e["ok"] for e in d["evidence"])


def test_table1_sums_in_evidence():
    ev = {e["name"]: e for e in verify.check_myth4(0).evidence}
    assert [round(ev[f"table1_sum_{p}"]["sum_rate"], 2) for p in "ABCDE"] == [0.79, 2.05, 3.62, 3.77, 3.83]


def test_corrupted_rate_formula_is_caught(monkeypatch):
    def broken(g1, g2, alpha):
        # weak user's rate without the interference term
        return 0.5 * math.log2(1 + alpha * g1), 0.5 * math.log2(1 + (1 - alpha) * g2)

    monkeypatch.setattr(verify, "noma_two_user", broken)
    assert not verify.check_myth4(0).confirmed or not verify.check_myth1(0).confirmed


def test_unknown_myth():
    with pytest.raises(KeyError):
        verify.run_checks(0, [7])

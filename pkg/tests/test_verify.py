import io

import pytest

from hassettcore.check import Check, CheckResult
from hassettcore.weights import HeavyLightProfile, WeightInstance
from verify import (
    ProgressBar,
    VerificationSuite,
    build_checks,
    check_canonical_form,
    check_hilbert,
    check_linalg_rank_scaling,
    check_linalg_rank_transpose,
    check_linalg_snf_determinant,
    check_pullback,
    check_support_equality,
    format_report,
    instance_checks,
    linalg_checks,
    profile_checks,
)


def fails():
    raise RuntimeError("boom")


def test_check_accepts_bool_and_detail():
    assert Check("plain", 4, lambda: True).execute().passed
    result = Check("detailed", 4, lambda: (False, "off by one")).execute()
    assert not result.passed
    assert result.detail == "off by one"


def test_check_reports_exceptions():
    result = Check("raises", 4, fails).execute()
    assert not result.passed
    assert result.detail == "RuntimeError: boom"
    assert result.seconds >= 0


def test_checks_sort_by_size_then_name():
    checks = [Check("b", 5, fails), Check("a", 5, fails), Check("z", 4, fails)]
    assert [c.name for c in sorted(checks)] == ["z", "a", "b"]


def test_check_result_to_dict():
    assert CheckResult("x", True, "", 0.12345).to_dict() == {
        "name": "x", "passed": True, "detail": "", "seconds": 0.123,
    }


def test_profile_check_names(losev_manin):
    names = [c.name for c in profile_checks(losev_manin)]
    assert "chow.hilbert (1,1,1/4,1/4,1/4)" in names
    assert "fan.projection (1,1,1/4,1/4,1/4)" in names
    assert "fan.support (1,1,1/4,1/4,1/4)" in names


def test_keel_profile_has_no_projection_check(keel5):
    assert not any(c.name.startswith("fan.projection") for c in profile_checks(keel5))


def test_large_profiles_skip_exhaustive_checks():
    names = [c.name for c in profile_checks(HeavyLightProfile.from_counts(3, 7), level="full")]
    assert not any(name.startswith("chow.pullback") for name in names)
    assert not any(name.startswith("fan.support") for name in names)
    assert any(name.startswith("chow.hilbert") for name in names)


def test_build_checks_for_one_profile(losev_manin):
    checks = build_checks(profile=losev_manin)
    keys = [(c.n, c.name) for c in checks]
    assert keys == sorted(keys)
    assert sum(c.name.startswith("keel.iso") for c in checks) == 1


def test_build_checks_fast_level():
    checks = build_checks(level="fast")
    assert {c.name for c in checks if c.name.startswith("keel.iso")} == {"keel.iso n=4", "keel.iso n=5"}
    assert [c.n for c in checks] == sorted(c.n for c in checks)


def test_linalg_checks_run_once_per_level(losev_manin):
    names = [c.name for c in build_checks(profile=losev_manin)]
    assert [name for name in names if name.startswith("linalg.")] == [
        "linalg.rank_scaling size<=5",
        "linalg.rank_transpose size<=5",
        "linalg.snf_determinant size<=5",
    ]
    assert {c.n for c in linalg_checks("full")} == {7}


def test_linalg_checks_pass():
    assert check_linalg_rank_transpose(5)[0]
    assert check_linalg_rank_scaling(5)[0]
    assert check_linalg_snf_determinant(5)[0]


def test_build_checks_rejects_unknown_level():
    with pytest.raises(ValueError):
        build_checks(level="thorough")


def test_individual_checks(losev_manin):
    assert check_canonical_form(losev_manin)[0]
    assert check_hilbert(losev_manin, [1, 4, 1]) == (True, "h = [1, 4, 1]")
    assert not check_hilbert(losev_manin, [1, 5, 1])[0]
    assert check_pullback(losev_manin)[0]
    assert check_support_equality(losev_manin)[0]


def test_instance_checks(instances_dir):
    instance = WeightInstance.from_json(instances_dir / "losev_manin_5.json")
    checks = instance_checks(instance)
    assert len(checks) == 2
    assert all(c.execute().passed for c in checks)


def test_suite_standard(losev_manin):
    results = VerificationSuite(build_checks(profile=losev_manin), show_progress=False).run("standard")
    failed = [r.name for r in results if not r.passed]
    assert failed == []


def test_suite_parallel_keeps_order(losev_manin_4):
    checks = build_checks(profile=losev_manin_4)
    results = VerificationSuite(checks, show_progress=False).run("parallel")
    assert [r.name for r in results] == [c.name for c in checks]
    assert all(r.passed for r in results)


def test_suite_rejects_unknown_method():
    with pytest.raises(ValueError):
        VerificationSuite([], show_progress=False).run("gpu")


def test_format_report():
    results = [CheckResult("a", True, "fine", 0.0), CheckResult("b", False, "", 0.0)]
    assert format_report(results) == ["PASS a: fine", "FAIL b", "1 passed, 1 failed"]


def test_progress_bar_counts_failures():
    stream = io.StringIO()
    bar = ProgressBar(2, stream=stream)
    bar.update(CheckResult("a", False, "", 0.0), n=4)
    bar.update(CheckResult("b", True, "", 0.0), n=5)
    text = stream.getvalue()
    assert "1/2 n=4 | 1 failed" in text
    assert "2/2 n=5 | 1 failed" in text
    assert text.endswith("\n")
    assert bar.failed == 1

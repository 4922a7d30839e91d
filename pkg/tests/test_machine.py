"""Bounded machine tests: statuses, exhaustiveness, Kraft, pinned constants."""

import random
from fractions import Fraction

import pytest

from mdimlab import constants
from mdimlab.codec import encode_point, RationalPoint
from mdimlab.machine import (
    HALTED,
    INVALID,
    OUT_OF_BUDGET,
    MachineConfig,
    ResourceExceededError,
    apriori_mass,
    enumerate_halting,
    exact_k,
    iter_valid_programs,
    kraft_mass,
    run,
    symmetry_of_information_report,
)

CFG = MachineConfig(16, 1000)


def test_empty_program_is_invalid():
    assert run("", "", CFG).status == INVALID


def test_malformed_headers_are_invalid():
    assert run("0", "", CFG).status == INVALID          # truncated gamma
    assert run("00", "", CFG).status == INVALID
    assert run("10", "", CFG).status == INVALID         # declares 0 payload bits, has 1
    assert run("01000", "", CFG).status == INVALID      # declares 1, has 2


def test_partial_opcode_fetch_jams():
    # header declares a 1-bit payload; no opcode fits, so the machine never
    # halts and the bounded verdict is out_of_budget at every budget
    for budget in (1, 10, 10_000):
        res = run("0100", "", MachineConfig(16, budget))
        assert res.status == OUT_OF_BUDGET


def test_first_halting_program():
    first = next(iter(enumerate_halting(CFG)))
    assert first == (
        constants.FIRST_HALTING_PROGRAM,
        constants.FIRST_HALTING_OUTPUT,
    )


def test_run_is_pure():
    prog = "00100010"
    a = run(prog, "1101", CFG)
    b = run(prog, "1101", CFG)
    assert a == b and a.status == HALTED and a.output == "1101"


def test_enumeration_matches_brute_force_over_all_bitstrings():
    # independent route: run *every* bit string up to length 12, not just the
    # structurally valid ones, and compare the halting sets
    cfg = MachineConfig(12, 1000)
    brute = []
    for length in range(1, 13):
        for i in range(1 << length):
            bits = format(i, f"0{length}b")
            res = run(bits, "", cfg)
            if res.status == HALTED:
                brute.append((bits, res.output))
    brute.sort(key=lambda t: (len(t[0]), t[0]))
    assert brute == enumerate_halting(cfg)


def test_enumeration_is_length_lex_sorted():
    progs = [p for p, _ in enumerate_halting(CFG)]
    assert progs == sorted(progs, key=lambda s: (len(s), s))


def test_prefix_freeness_exhaustive():
    progs = sorted(p for p, _ in enumerate_halting(CFG))
    violations = [
        (a, b) for a, b in zip(progs, progs[1:]) if b.startswith(a)
    ]
    assert violations == []


def test_pinned_halting_counts():
    for (max_len, budget), count in constants.HALTING_COUNT.items():
        assert len(enumerate_halting(MachineConfig(max_len, budget))) == count


def test_kraft_mass_pinned_and_bounded():
    for (max_len, budget), mass in constants.KRAFT_MASS.items():
        got = kraft_mass(MachineConfig(max_len, budget))
        assert got == mass
        assert got <= 1


def test_kraft_mass_monotone_in_budget_and_length():
    a = kraft_mass(MachineConfig(14, 8))
    b = kraft_mass(MachineConfig(14, 1000))
    c = kraft_mass(MachineConfig(16, 1000))
    assert a <= b <= c


def test_budget_monotonicity():
    small, big = MachineConfig(16, 1), MachineConfig(16, 1000)
    halted_small = dict(enumerate_halting(small))
    halted_big = dict(enumerate_halting(big))
    assert halted_small.items() <= halted_big.items()
    # and enlarging the budget does strictly extend the halting set here
    assert len(halted_small) < len(halted_big)


def test_length_monotonicity():
    short = dict(enumerate_halting(MachineConfig(14, 1000)))
    long_ = dict(enumerate_halting(CFG))
    assert short.items() <= long_.items()


def test_out_of_budget_then_halted():
    # emit loop: with a tiny budget the same program runs out, then halts
    prog = next(
        p for p, out in enumerate_halting(CFG) if len(out) >= 4
    )
    starved = run(prog, "", MachineConfig(16, 3))
    assert starved.status == OUT_OF_BUDGET
    assert run(prog, "", CFG).status == HALTED


def test_exact_k_of_empty_string():
    rep = exact_k("", "", CFG)
    assert rep.value == 1 and rep.witness == "1" and rep.exhaustive


def test_exact_k_single_bits():
    assert exact_k("0", "", CFG).value == 8
    assert exact_k("1", "", CFG).value == 8


def test_echo_constant():
    for x in ["0110", "10101", "111000111"]:
        rep = exact_k(x, x, CFG)
        assert rep.value == constants.ECHO_COST
        assert rep.witness == constants.ECHO_WITNESS


def test_exact_k_not_found_is_none():
    rng = random.Random(23)
    target = "".join(rng.choice("01") for _ in range(64))
    assert exact_k(target, "", CFG) is None


def test_conditioning_can_only_help_via_echo():
    # a target that is unreachable unconditionally costs only the echo
    # program once it is supplied as the conditional input
    target = "11010010111010110010"
    assert exact_k(target, "", CFG) is None
    assert exact_k(target, target, CFG).value == constants.ECHO_COST


def test_apriori_mass_monotone_and_bounded():
    outputs = {out for _, out in enumerate_halting(CFG)}
    some = {"", "0"}
    assert apriori_mass(some, CFG) <= apriori_mass(some | {"1"}, CFG)
    assert apriori_mass(outputs, CFG) == kraft_mass(CFG)
    assert apriori_mass({"0" * 99}, CFG) == Fraction(0)


def test_apriori_mass_known_singleton():
    # the empty output is produced by many programs; its mass dominates 2**-1
    mass = apriori_mass({""}, CFG)
    assert mass >= Fraction(1, 2)


def test_resource_cap():
    with pytest.raises(ResourceExceededError):
        enumerate_halting(MachineConfig(16, 1000, item_cap=10))


def test_valid_program_count_at_16():
    assert sum(1 for _ in iter_valid_programs(16)) == 1023


def test_symmetry_of_information_report():
    rows = symmetry_of_information_report(MachineConfig(24, 256), sample_size=4)
    assert rows, "sample must produce at least one measurable pair"
    max_delta = max(r.delta for r in rows)
    assert max_delta == constants.SYMMETRY_MAX_DELTA
    assert max_delta <= constants.SYMMETRY_ALARM


def test_k_of_point_encodings_pinned():
    cfg = MachineConfig(24, 256)
    from mdimlab.codec import DyadicRational

    table = {
        "0": RationalPoint.of(0),
        "1/2": RationalPoint.of(DyadicRational(1, 1)),
        "1": RationalPoint.of(1),
        "-1": RationalPoint.of(-1),
    }
    for name, pt in table.items():
        rep = exact_k(encode_point(pt), "", cfg)
        assert rep is not None and rep.value == constants.K_POINT[name]
    rep = exact_k(encode_point(RationalPoint.of(0, 0)), "", MachineConfig(27, 256))
    assert rep.value == constants.K_POINT["(0,0)"]

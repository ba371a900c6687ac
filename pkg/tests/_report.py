"""Collects one line per acceptance criterion for the terminal summary."""

LINES = {}


def record(number, passed, detail):
    status = "PASS" if passed else "FAIL"
    line = f"[{status}] criterion {number:>2}: {detail}"
    LINES[number] = line
    print(line)
    return passed

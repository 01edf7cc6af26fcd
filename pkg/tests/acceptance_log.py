"""Collects one line per acceptance criterion for the terminal summary."""
RESULTS: list[str] = []


def record(number: int, ok: bool, detail: str) -> bool:
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)
    return ok

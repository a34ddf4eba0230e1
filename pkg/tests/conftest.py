from zipstrat.dieudonne import hilbert, siegel, unitary
from zipstrat.ffalg import identity

# the configurations exercised by the acceptance suite
CONFIGS = {
    "hilbert-e1": hilbert(3, 1, 1),
    "hilbert-e2": hilbert(3, 2, 1),
    "hilbert-e3": hilbert(3, 3, 1),
    "hilbert-e2-f2": hilbert(3, 2, 2),
    "siegel-g2-e2": siegel(3, 2, 2),
    "unitary-12": unitary(3, 3, [[1, 2]], 2),
    "unitary-21": unitary(3, 3, [[2, 1]], 2),
}


def antidiag_sp(F, h):
    """Antidiagonal element of Sp_h: -1 in the first half of the rows."""
    return tuple(tuple((F.neg[1] if r < h // 2 else 1) if c == h - 1 - r else 0 for c in range(h))
                 for r in range(h))


def ident(h):
    return identity(h)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

from pathlib import Path

import pytest

from capclass.dataset import load_transactions

DATA = Path(__file__).parent / "data"
TOY_FILE = DATA / "toy.txt"


def readable(rules, d):
    """Rules as a set of (frozenset of item tokens, label token)."""
    return {(frozenset(d.dictionary.token(i) for i in r.antecedent),
             d.label_names.token(r.consequent)) for r in rules}


def ids(d, *tokens):
    return tuple(sorted(d.dictionary.lookup(t) for t in tokens))


@pytest.fixture
def toy():
    return load_transactions(TOY_FILE, "last")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)

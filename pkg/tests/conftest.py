import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("robq", deadline=None, derandomize=True)
settings.load_profile("robq")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.VERDICTS[k])

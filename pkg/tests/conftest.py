import warnings
from pathlib import Path

import pytest

from movekit import datasets
from movekit.classifier import EncoderConfig, ModelConfig, TrainConfig, train

FIXTURES = Path(__file__).parent / "fixtures"

# one visible PASS/FAIL line per acceptance criterion, printed after the run
_acceptance_lines: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if "test_acceptance" not in item.nodeid or report.when != "call":
        return
    name = item.name.replace("test_", "", 1)
    if report.passed:
        _acceptance_lines.append(f"PASS  {name}")
    elif report.failed:
        _acceptance_lines.append(f"FAIL  {name}")
    elif report.skipped:
        _acceptance_lines.append(f"SKIP  {name}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def keyword_data():
    """Moderate keyword-planted split shared by classifier/saliency tests."""
    return datasets.make_keyword_dataset(n_train=400, n_test=100, seed=11)


@pytest.fixture(scope="session")
def keyword_model(keyword_data):
    """Plain-variant model trained once per session on the keyword data."""
    train_ex, test_ex = keyword_data
    mc = ModelConfig(encoder=EncoderConfig(vocab_size=400, hidden=64, layers=2,
                                           heads=2, ff=128, max_len=32))
    tc = TrainConfig(epochs=18, batch_size=32, learning_rate=2e-3, seed=5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        clf, metrics = train(train_ex, tc, mc, dev_examples=test_ex[:50])
    return clf

import pytest

from rffuq.harness import ExperimentConfig, run_experiment

# The protocol at desk scale: 10 trials, J in {10, 50, 100}, M = L = 20.
DESK = ExperimentConfig(n=200, n_train=160, trials=10, j_values=(10, 50, 100), m=20, l=20, seed=0)

# Smallest config that still exercises every stage of the pipeline.
TINY = ExperimentConfig(
    n=14, n_train=10, trials=2, j_values=(4, 6), m=2, l=3, outer_iters=2, latent_iters=3, restarts=2, seed=5
)


@pytest.fixture(scope="session")
def desk_results():
    return run_experiment(DESK)


@pytest.fixture(scope="session")
def tiny_results():
    return run_experiment(TINY)


# One line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

import time

from hypothesis import HealthCheck, settings

# wall-clock origin for the suite runtime budget check; conftest imports
# before any test module runs
SUITE_T0 = time.perf_counter()

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# Fixture means for the threshold-security analyses. They are pinned by two
# access thresholds: (single, triple) = (8, 4) makes the equal-likelihood
# crossing exactly 8 ln 2 = 5.5452, and the pair mean back-solves
# crossing(8, mu) = 6.8. These stand in for measured per-coalition means,
# which are not part of this package's inputs.
MU_SINGLE_ANCHOR = 8.0
MU_PAIR_ANCHOR = 5.828468526871509
MU_TRIPLE_ANCHOR = 4.0


def pytest_collection_modifyitems(config, items):
    # the runtime-budget check must observe the whole suite, so it runs last
    tail = [it for it in items if it.name == "test_criterion_9_total_runtime"]
    for it in tail:
        items.remove(it)
    items.extend(tail)

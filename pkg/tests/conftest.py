from hypothesis import HealthCheck, settings

# fully deterministic property tests: repeated suite runs explore the same
# examples, matching the package's reproducibility contracts
settings.register_profile(
    "deterministic",
    derandomize=True,
    suppress_health_check=[HealthCheck.differing_executors],
)
settings.load_profile("deterministic")

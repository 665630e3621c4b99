def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full sweeps at the default quadrature")

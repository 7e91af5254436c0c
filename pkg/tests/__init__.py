"""Test package for rsuplan.

Run tests with pytest:

    pytest

Or with coverage:

    coverage run -m pytest
    coverage report
"""

# Tests are organized in modules:
# - test_trajectory_db.py, test_mining.py: databases, support and pattern mining
# - test_coverage.py, test_hespic.py, test_mip.py: the placement strategies
# - test_evaluator.py, test_synth.py: replay, sweeps and synthetic inputs
# - test_properties.py: hypothesis checks against the brute-force oracles
# - test_cli.py, test_config.py: the command-line interface and its configuration

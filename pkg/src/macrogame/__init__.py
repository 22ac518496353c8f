"""macrogame: a multi-agent macroeconomic simulator with an RL best-response
oracle, empirical-game construction, Nash meta-solving and regret analysis."""

__version__ = "0.1.0"

"""
Abstention-aware federated voting: simulator, baselines and privacy audit tools
"""

__version__ = "1.0.0"

# format: YY.minor.micro
__version__ = "24.0.0"

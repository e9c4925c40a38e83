import logging

# We also produce log messages below DEBUG level (per-batch losses).
MACHINE_LOG_LEVEL = 5
pprnet_log = logging.getLogger("pprnet")
pprnet_log.setLevel(MACHINE_LOG_LEVEL)

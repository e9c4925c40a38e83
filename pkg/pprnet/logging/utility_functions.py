import logging
import os
import sys

pprnet_log = logging.getLogger("pprnet")


def register_stream_log(verbosity: int) -> None:
    """Log to stdout at `verbosity`, replacing any handler registered before."""
    previously_registered_handler = [
        handler for handler in pprnet_log.handlers if hasattr(handler, "tag")
    ]
    if len(previously_registered_handler) > 0:
        pprnet_log.debug("Removing StreamHandlers registered by a previous run.")
        pprnet_log.handlers = [
            handler
            for handler in pprnet_log.handlers
            if not (
                hasattr(handler, "tag") and isinstance(handler, logging.StreamHandler)
            )
        ]

    stdout_streamhandler = logging.StreamHandler(sys.stdout)
    setattr(stdout_streamhandler, "tag", "machine_set")
    stdout_streamhandler.setLevel(verbosity)
    pprnet_log.addHandler(stdout_streamhandler)


def register_file_log(output_directory: str) -> str:
    """Write DEBUG and above to `pprnet.log` in `output_directory`."""
    os.makedirs(output_directory, exist_ok=True)
    log_file = os.path.join(output_directory, "pprnet.log")
    log_handler = logging.FileHandler(log_file)
    log_handler.setLevel(logging.DEBUG)
    log_format = logging.Formatter("[%(asctime)s - %(name)s] %(message)s")
    log_handler.setFormatter(log_format)
    pprnet_log.addHandler(log_handler)
    return log_file

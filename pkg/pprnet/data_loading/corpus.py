import glob
import logging
import os
from typing import List, Optional

from pprnet.errors import ConfigurationError
from pprnet.signal.recording import Domain, Montage, Recording

from .annotations import read_ppr_csv, read_seizure_summary
from .edf import read_edf

log = logging.getLogger(__name__)


def read_corpus(
    directory: str,
    domain: Domain,
    summary_path: Optional[str] = None,
    montage: Optional[Montage] = None,
) -> List[Recording]:
    """Read every EDF file in `directory` with its annotations.

    Annotations come from the seizure summary at `summary_path` if given,
    otherwise from the CSV file next to each EDF file. A recording without
    either has no annotations. The montage of each file is inferred from its
    channel labels unless `montage` is given.

    Raises
    ------
    ConfigurationError
        If `directory` holds no EDF files.
    """
    paths = sorted(glob.glob(os.path.join(directory, "*.edf")))
    if not paths:
        raise ConfigurationError(f"No EDF files found in {directory}.")
    seizures = read_seizure_summary(summary_path) if summary_path else None

    recordings = []
    for path in paths:
        if seizures is not None:
            annotations = seizures.get(os.path.basename(path), [])
        else:
            csv_path = os.path.splitext(path)[0] + ".csv"
            annotations = read_ppr_csv(csv_path) if os.path.exists(csv_path) else []
        recordings.append(
            read_edf(path, domain=domain, montage=montage, annotations=annotations)
        )
    montages = sorted({r.montage.value for r in recordings})
    log.info(
        f"Read {len(recordings)} {domain.value} recordings ({', '.join(montages)}) "
        f"from {directory}."
    )
    return recordings

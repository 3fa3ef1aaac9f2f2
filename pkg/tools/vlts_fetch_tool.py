"""Download VLTS benchmark models and pin their checksums.

Files land in ``SIMSHELL_VLTS_DIR`` as plain ``<model>.aut``. Digests of the
decompressed files are kept in ``vlts.lock.json`` next to them; a model with
no recorded digest is trusted and recorded on first download.
"""

from __future__ import annotations

import gzip
import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Optional

import requests
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from settings import FetchError, vlts_dir

logger = logging.getLogger(__name__)

VLTS_URL_ENV = "SIMSHELL_VLTS_URL"
DEFAULT_VLTS_URL = "https://cadp.inria.fr/resources/vlts"
LOCK_FILE_NAME = "vlts.lock.json"
TIMEOUT_SECONDS = 60

# models whose published rows are checked by the test suite
TABLE_MODELS = ("vasy_0_1", "cwi_1_2", "vasy_1_4")


def sha256_of(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class VLTSFetchTool:
    """Fetches ``<model>.aut.gz`` files and keeps the checksum lock file current."""

    def __init__(self, directory: Optional[Path] = None, base_url: Optional[str] = None):
        self.directory = Path(directory) if directory is not None else vlts_dir()
        self.base_url = (base_url or os.environ.get(VLTS_URL_ENV) or DEFAULT_VLTS_URL).rstrip("/")
        self.lock_path = self.directory / LOCK_FILE_NAME
        self.lock: dict[str, str] = self._load_lock()
        self.session = requests.Session()

    def _load_lock(self) -> dict[str, str]:
        if not self.lock_path.exists():
            return {}
        try:
            return json.loads(self.lock_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise FetchError(f"unreadable lock file {self.lock_path}: {e}") from e

    def _save_lock(self) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        self.lock_path.write_text(json.dumps(self.lock, indent=4, sort_keys=True) + "\n", encoding="utf-8")

    @retry(
        retry=retry_if_exception_type(requests.RequestException),
        stop=stop_after_attempt(4),
        wait=wait_exponential(multiplier=1, max=20),
        reraise=True,
    )
    def _download(self, url: str) -> bytes:
        logger.info("downloading %s", url)
        response = self.session.get(url, timeout=TIMEOUT_SECONDS)
        response.raise_for_status()
        return response.content

    def target(self, model: str) -> Path:
        return self.directory / f"{model}.aut"

    def fetch(self, model: str, *, force: bool = False) -> Path:
        """Return the local path of ``model``, downloading it when missing or forced."""
        path = self.target(model)
        if path.exists() and not force:
            self.verify(model)
            return path
        url = f"{self.base_url}/{model}.aut.gz"
        try:
            payload = gzip.decompress(self._download(url))
        except requests.RequestException as e:
            raise FetchError(f"could not download {url}: {e}") from e
        except OSError as e:
            raise FetchError(f"{url} is not a gzip file: {e}") from e
        self._check(model, payload)
        self.directory.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
        return path

    def _check(self, model: str, payload: bytes) -> None:
        digest = sha256_of(payload)
        expected = self.lock.get(model)
        if expected is None:
            logger.warning("no recorded digest for %s, recording %s", model, digest)
            self.lock[model] = digest
            self._save_lock()
        elif expected != digest:
            raise FetchError(f"checksum mismatch for {model}: expected {expected}, got {digest}")

    def verify(self, model: str) -> None:
        self._check(model, self.target(model).read_bytes())

    def fetch_all(self, models: tuple[str, ...] = TABLE_MODELS) -> list[Path]:
        return [self.fetch(model) for model in models]

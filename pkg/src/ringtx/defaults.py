"""Packaged default device model and run-configuration loading.

The shipped response table is a fitted depletion model (root-law index
increase, root-law loss decrease) calibrated to the qualitative regime the
segmented-drive comparison needs; regenerate with
``scripts/make_default_device.py``. A run configuration is a single JSON
document holding the ring geometry, the response table (embedded ``rows``
or a ``response_csv`` path next to the file), and an optional default
encoding block.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .device import (
    ElectroOpticResponse,
    RingConfig,
    load_response_csv,
    ring_config_from_dict,
)
from .ring import check_over_coupling

THREE_SEGMENT = "three_segment"
TWO_SEGMENT = "two_segment"


def _data_text(name: str) -> str:
    return resources.files("ringtx.data").joinpath(name).read_text()


def default_response() -> ElectroOpticResponse:
    doc = json.loads(_data_text("config_three_segment.json"))
    return _response_from_doc(doc["response"])


def default_ring(kind: str = THREE_SEGMENT) -> RingConfig:
    if kind not in (THREE_SEGMENT, TWO_SEGMENT):
        raise ValueError(f"unknown ring kind {kind!r}")
    return ring_config_from_dict(json.loads(_data_text(f"ring_{kind}.json")))


def default_setup(kind: str = THREE_SEGMENT):
    """(RingConfig, ElectroOpticResponse) for the packaged device."""
    cfg = default_ring(kind)
    resp = default_response()
    check_over_coupling(cfg, resp)
    return cfg, resp


def default_config_path(kind: str = THREE_SEGMENT) -> Path:
    return Path(str(resources.files("ringtx.data").joinpath(f"config_{kind}.json")))


def _response_from_doc(doc: dict) -> ElectroOpticResponse:
    return ElectroOpticResponse(
        rows=tuple(tuple(r) for r in doc["rows"]),
        lambda_ref_nm=float(doc["lambda_ref_nm"]),
    )


def load_run_config(path):
    """Parse a run-config JSON into (RingConfig, response, encoding-dict)."""
    path = Path(path)
    with open(path) as fh:
        doc = json.load(fh)
    cfg = ring_config_from_dict(doc["ring"])
    if "response" in doc:
        resp = _response_from_doc(doc["response"])
    elif "response_csv" in doc:
        csv_path = Path(doc["response_csv"])
        if not csv_path.is_absolute():
            csv_path = path.parent / csv_path
        resp = load_response_csv(csv_path, float(doc["response_lambda_ref_nm"]))
    else:
        raise ValueError("config needs a 'response' block or 'response_csv' path")
    encoding = doc.get("encoding", {})
    check_over_coupling(cfg, resp)
    return cfg, resp, encoding

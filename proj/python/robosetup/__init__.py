"""Python access to the robosetup core: models, ACM, SRDF, bundles, service."""

import json

from ._core import (
    RobosetupError,
    RobotModel,
    Service,
    expand_sweep,
    load_urdf,
    normalize_srdf,
    parse_urdf,
    run_cli,
    sweep_values,
    validate_srdf,
)
from . import _core

__all__ = [
    "RobosetupError",
    "RobotModel",
    "Service",
    "expand_sweep",
    "forward_kinematics",
    "generate_acm",
    "generate_bundle",
    "load_urdf",
    "normalize_srdf",
    "parse_urdf",
    "request",
    "run_cli",
    "sweep_values",
    "validate_srdf",
]


def forward_kinematics(model, positions=None):
    """Link name -> {"xyz", "quat", "rpy"} for the given joint positions."""
    return json.loads(model.fk_json(positions or {}))


def generate_acm(model, samples=10000, seed=0, threshold=0.95, threads=0):
    """ACM report as a dict (same document as `robosetup acm`)."""
    return json.loads(_core.generate_acm_json(model, samples, seed, threshold, threads))


def generate_bundle(model, srdf, model_path="", acm=None):
    """Manifest plus file contents of the configuration bundle."""
    acm_json = json.dumps(acm) if isinstance(acm, dict) else (acm or "")
    return json.loads(_core.generate_bundle_json(model, srdf, model_path, acm_json))


def request(service, method, path, body=None):
    """Call the service in-process; returns (status, decoded body)."""
    payload = "" if body is None else json.dumps(body)
    status, text, content_type = service.handle(method, path, payload)
    return status, (json.loads(text) if content_type == "application/json" else text)

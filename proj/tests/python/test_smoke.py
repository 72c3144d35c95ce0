import os
import pathlib

import pytest

import robosetup

DATA = pathlib.Path(os.environ.get("ROBOSETUP_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def text(name):
    return (DATA / name).read_text()


def test_model_and_fk():
    model = robosetup.load_urdf(str(DATA / "planar_2link.urdf"))
    assert model.active_joints == ["j1", "j2"]
    poses = robosetup.forward_kinematics(model, {"j1": 0.0, "j2": 0.0})
    assert poses["tip"]["xyz"] == [2.0, 0.0, 0.0]
    with pytest.raises(robosetup.RobosetupError, match="parse_error"):
        robosetup.parse_urdf("<robot name='x'><link name='a'>")


def test_acm_is_seeded():
    model = robosetup.load_urdf(str(DATA / "sample_arm.urdf"))
    a = robosetup.generate_acm(model, samples=2000, seed=7, threads=1)
    b = robosetup.generate_acm(model, samples=2000, seed=7, threads=4)
    assert a == b
    assert a["params"]["seed"] == 7


def test_srdf_and_bundle():
    model = robosetup.load_urdf(str(DATA / "sample_arm.urdf"))
    srdf = text("sample_arm.srdf")
    once = robosetup.normalize_srdf(srdf, model)
    assert robosetup.normalize_srdf(once, model) == once
    bundle = robosetup.generate_bundle(model, srdf, model_path="sample_arm.urdf")
    assert len(bundle["contents"]) == 6
    assert bundle == robosetup.generate_bundle(model, srdf, model_path="sample_arm.urdf")


def test_sweeps():
    assert robosetup.sweep_values("planner.goal_bias", 0.0, 0.3, 0.1) == pytest.approx([0.0, 0.1, 0.2, 0.3])
    assert len(robosetup.expand_sweep([("a", 0, 1, 0.5), ("b", 1, 2, 1)])) == 6


def test_service_and_cli():
    service = robosetup.Service()
    status, body = robosetup.request(service, "GET", "/api/model/geometry")
    assert status == 404 and body["code"] == "not_found"
    status, body = robosetup.request(service, "POST", "/api/project", {"path": str(DATA / "planar_2link.urdf")})
    assert status == 200
    status, body = robosetup.request(service, "POST", "/api/fk", {"positions": {"j1": 0.0, "j2": 0.0}})
    assert status == 200 and body["links"]["tip"]["xyz"] == [2.0, 0.0, 0.0]
    code, out, _ = robosetup.run_cli(["validate", str(DATA / "two_link.urdf")])
    assert code == 0 and "0 errors" in out
    assert robosetup.run_cli(["frobnicate"])[0] == 2

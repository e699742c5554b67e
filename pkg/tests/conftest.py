import pytest


@pytest.fixture(scope="session")
def inst():
    from k3borcherds.instance import load_instance
    return load_instance()


@pytest.fixture(scope="session")
def ctx(inst):
    from k3borcherds.chambers import ChamberContext
    return ChamberContext(inst)


@pytest.fixture(scope="session")
def scan(ctx):
    from k3borcherds.chambers import borcherds_scan
    return borcherds_scan(ctx)


@pytest.fixture(scope="session")
def orbit_names(inst, ctx, scan):
    from k3borcherds.chambers import name_wall_orbits
    return name_wall_orbits(ctx, scan, inst.goldens)


@pytest.fixture(scope="session")
def lab(ctx, scan, orbit_names):
    from k3borcherds.faces import FaceLab
    return FaceLab(ctx, scan, cap=3, orbit_numbers=orbit_names)


@pytest.fixture(scope="session")
def alphabet(ctx, scan, lab):
    from k3borcherds.relations import build_alphabet
    return build_alphabet(ctx, scan, lab)


@pytest.fixture(scope="session")
def config_groups(inst):
    from k3borcherds.instance import configuration_automorphisms
    return configuration_automorphisms(inst)

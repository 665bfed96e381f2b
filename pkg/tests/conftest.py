import numpy as np
import pytest

from ssm_dyn.experiments import dfs4_model, ns3_model
from ssm_dyn.liouville import LiouvillianModel, assemble
from ssm_dyn.spin_ops import PAULI
from ssm_dyn.ssm_projection import kernel_projector


@pytest.fixture(scope="session")
def dfs4_system():
    """Four-qubit collective-dissipation model with the x gate, assembled
    once per session: (model, l0, k, ssm)."""
    model = dfs4_model(axis="x")
    l0, k, _ = assemble(model)
    return model, l0, k, kernel_projector(l0)


@pytest.fixture(scope="session")
def ns3_system():
    model = ns3_model()
    l0, k, _ = assemble(model)
    return model, l0, k, kernel_projector(l0)


@pytest.fixture(scope="session")
def dephasing_system():
    """Single qubit, collective-dephasing generator, sigma_x perturbation;
    the minimal model with vanishing first-order effective generator."""
    model = LiouvillianModel(dim=2, lindblad_terms=[(PAULI["z"], 1.0)],
                             perturbation=PAULI["x"])
    l0, k, _ = assemble(model)
    return model, l0, k, kernel_projector(l0)


def random_density_matrix(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real

import pytest

from wsnguard import Scenario, TrainingSpec, load_scenario, train_network


@pytest.fixture(scope="session")
def case1_scenario():
    return load_scenario("case1")


@pytest.fixture(scope="session")
def trained_net(case1_scenario):
    """The full 24-48-24-1 net for the bundled case studies (trained once)."""
    return train_network(case1_scenario)


@pytest.fixture(scope="session")
def trained_net_path(trained_net, tmp_path_factory):
    path = tmp_path_factory.mktemp("net") / "case.npz"
    trained_net.save(path)
    return path


def make_small_scenario(**overrides):
    """A 9-node scenario with a tiny net, for fast simulator tests."""
    sc = Scenario(name="small", node_count=9, grid_columns=3, target_node=4,
                  neighbor_count=4, hidden_sizes=(8,), total_steps=30,
                  training=TrainingSpec(samples=120, seed=3, max_epochs=15))
    for key, value in overrides.items():
        setattr(sc, key, value)
    assert not sc.validate()
    return sc


@pytest.fixture(scope="session")
def small_scenario():
    return make_small_scenario()


@pytest.fixture(scope="session")
def small_net(small_scenario):
    return train_network(small_scenario)

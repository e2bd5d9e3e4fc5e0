import pytest

from crosswalk.domain import (
    POST_SURVEY,
    TRUST_QUESTION,
    GridWorld,
    JointState,
    ModelParams,
    Scenario,
    StopProfile,
    SurveyTable,
    canonical_scenarios,
)


def test_grid_defaults_and_validation():
    g = GridWorld()
    assert (g.width, g.height, g.distance_cap) == (7, 7, 6)
    with pytest.raises(ValueError):
        GridWorld(1, 5)
    with pytest.raises(ValueError):
        GridWorld(3, 3, distance_cap=0)


def test_grid_step_clamps_at_edges():
    g = GridWorld(3, 3)
    assert g.step((0, 0), (-1, 0)) == (0, 0)
    assert g.step((2, 2), (0, 1)) == (2, 2)
    assert g.step((1, 1), (1, 0)) == (2, 1)


def test_index_roundtrip():
    g = GridWorld(5, 4)
    for i in range(g.n_cells):
        assert g.index(g.cell(i)) == i


def test_joint_state_validation():
    g = GridWorld()
    with pytest.raises(ValueError, match="outside"):
        JointState((7, 0), (0, 0), (1, 1), (2, 2)).validate(g)
    with pytest.raises(ValueError, match="car's cell"):
        JointState((1, 1), (2, 2), (3, 3), (0, 0), ped_in_car=True).validate(g)
    JointState((1, 1), (1, 1), (3, 3), (0, 0), ped_in_car=True).validate(g)


def test_stop_profile_lookup_and_monotone():
    prof = StopProfile.from_mapping({1: 0.9, 3: 0.7}, beyond=0.1)
    assert [prof(d) for d in range(6)] == [0.9, 0.9, 0.7, 0.7, 0.1, 0.1]
    with pytest.raises(ValueError, match="non-increasing"):
        StopProfile.from_mapping({1: 0.3, 3: 0.7})
    with pytest.raises(ValueError):
        StopProfile.from_mapping({1: 1.2})


def test_survey_table_matches_published_rows():
    assert POST_SURVEY.score(1, TRUST_QUESTION) == 27
    assert POST_SURVEY.score(2, TRUST_QUESTION) == 25
    assert POST_SURVEY.score(3, TRUST_QUESTION) == 9
    assert POST_SURVEY.score(4, TRUST_QUESTION) == 6
    assert POST_SURVEY.scores[1] == (28, 28, 29, 27, 25, 28, 18, 22)
    assert POST_SURVEY.scores[4] == (9, 7, 8, 6, 12, 6, 9, 11)
    with pytest.raises(ValueError):
        SurveyTable(("q",), {1: (31,)})


def test_canonical_scenarios():
    s1, s2, s3, s4 = canonical_scenarios()
    assert s1.trust_level == pytest.approx(0.9)
    assert s4.trust_level == pytest.approx(0.2)
    assert [s.distance_threshold for s in (s1, s2, s3, s4)] == [1, 3, 1, 6]
    assert s2.stop_profile(3) == 0.7
    assert s3.stop_profile(3) == 0.3
    assert len({(s.ics_enabled, s.prior_knowledge) for s in (s1, s2, s3, s4)}) == 4
    assert s1.trust_level > s2.trust_level > s3.trust_level > s4.trust_level


def test_scenario_default_base_and_validation():
    sc = Scenario(9, "x", True, True, 1, 0.75, StopProfile(((1, 0.9),)))
    assert sc.interaction_reward_base == pytest.approx(-0.25)
    with pytest.raises(ValueError):
        Scenario(9, "x", True, True, 1, 1.5, StopProfile(()))
    with pytest.raises(ValueError):
        Scenario(9, "x", True, True, -1, 0.5, StopProfile(()))


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(phi=1.5)
    with pytest.raises(ValueError):
        ModelParams(horizon=0)

import pytest

from monofunnel.config import (ConfigError, default_config, parse_config,
                               render_config, apply_overrides,
                               parse_windows, parse_times, model_params,
                               funnel_spec, controller_config,
                               integrator_config)


def test_empty_text_gives_defaults():
    assert parse_config("", "mem") == default_config()


def test_defaults_match_standard_setup():
    values = default_config()
    assert values["mesh.nx"] == 64
    assert values["controller.k0"] == 0.75
    assert values["funnel.gamma"] == 0.05
    assert values["funnel.tau"] == 100.0
    assert values["stimulus.windows"] == "49:51,299:301"
    assert values["run.t_end"] == 400.0


def test_render_parse_idempotent():
    values = default_config()
    values["mesh.nx"] = 24
    values["run.track_stimulus"] = False
    text = render_config(values)
    assert parse_config(text, "mem") == values
    assert parse_config(render_config(parse_config(text, "mem")),
                        "mem") == values


def test_comments_and_blanks_ignored():
    text = "# leading comment\n\nmesh.nx = 12   # trailing\n\n"
    values = parse_config(text, "mem")
    assert values["mesh.nx"] == 12


def test_all_errors_collected_with_locations():
    text = ("mesh.nx = 8\n"
            "bogus.key = 1\n"
            "mesh.nx = 9\n"
            "controller.k0 = fast\n"
            "run.track_stimulus = True\n")
    with pytest.raises(ConfigError) as info:
        parse_config(text, "funnel.cfg")
    messages = "\n".join(info.value.errors)
    assert len(info.value.errors) == 4
    assert "funnel.cfg:2" in messages and "bogus.key" in messages
    assert "funnel.cfg:3" in messages  # duplicate assignment
    assert "funnel.cfg:4" in messages
    assert "funnel.cfg:5" in messages  # bools are lowercase only


def test_positivity_guards():
    with pytest.raises(ConfigError):
        parse_config("mesh.nx = 0\n", "mem")
    with pytest.raises(ConfigError):
        parse_config("run.sample_dt = 0.0\n", "mem")
    with pytest.raises(ConfigError):
        parse_config("modes.quad_points = -1\n", "mem")


def test_apply_overrides():
    values = apply_overrides(default_config(),
                             {"mesh.nx": "32", "controller.k0": "1.5"})
    assert values["mesh.nx"] == 32
    assert values["controller.k0"] == 1.5
    with pytest.raises(ConfigError):
        apply_overrides(default_config(), {"not.a.key": "1"})
    with pytest.raises(ConfigError):
        apply_overrides(default_config(), {"mesh.nx": "eight"})


def test_parse_windows():
    assert parse_windows("49:51,299:301") == ((49.0, 51.0),
                                              (299.0, 301.0))
    assert parse_windows("") == ()
    with pytest.raises(ConfigError):
        parse_windows("5:4")
    with pytest.raises(ConfigError):
        parse_windows("1;2")


def test_parse_times():
    assert parse_times("1.0, 2.5,3") == (1.0, 2.5, 3.0)
    assert parse_times("") == ()
    with pytest.raises(ConfigError):
        parse_times("1.0,abc")


def test_builders_reflect_values():
    values = apply_overrides(default_config(), {
        "model.c1": "2.0", "funnel.gamma": "0.1", "controller.k0": "1.25",
        "integrator.rtol": "1e-6"})
    assert model_params(values).c1 == 2.0
    assert funnel_spec(values).gamma == 0.1
    assert controller_config(values).k0 == 1.25
    assert integrator_config(values).rtol == 1e-6
    # invalid combinations surface through the dataclass guards
    bad = apply_overrides(default_config(), {"funnel.gamma": "-1.0"})
    with pytest.raises(ValueError):
        funnel_spec(bad)

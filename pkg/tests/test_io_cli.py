import json
import random
import warnings

import pytest

from meaning_games import (
    ScenarioError,
    load_discourse,
    load_game,
    parse_game,
    serialize_game,
    validate_game,
)
from meaning_games.cli import main
from generators import random_valid_game


class TestLoadGame:
    def test_bundled_pronoun_game(self, fig2_path):
        g = load_game(fig2_path)
        assert g.content_ids() == ("fred", "max")
        assert g.message_ids() == ("he", "the man")
        assert g.prior["fred"] == pytest.approx(0.6)
        assert g.utility.sender_cost[("max", "the man")] == pytest.approx(0.5)
        assert g.utility.shared
        assert g.is_complete()
        assert validate_game(g).ok

    def test_empty_file_is_a_parse_error(self, tmp_path):
        path = tmp_path / "empty.game"
        path.write_text("")
        with pytest.raises(ScenarioError, match="empty"):
            load_game(path)

    def test_malformed_json_names_the_position(self, tmp_path):
        path = tmp_path / "broken.game"
        path.write_text('{"contents": [,]}')
        with pytest.raises(ScenarioError, match=r"broken\.game:1:"):
            load_game(path)

    def test_unnormalized_prior_normalizes_with_warning(self, tmp_path):
        path = tmp_path / "raw.game"
        path.write_text(
            json.dumps(
                {
                    "contents": [{"id": "a"}, {"id": "b"}],
                    "messages": [{"id": "m", "cost": 0.0}, {"id": "n", "cost": 0.1}],
                    "prior": {"a": 3, "b": 1},
                }
            )
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            g = load_game(path)
        assert g.prior["a"] == pytest.approx(0.75)
        assert g.prior["b"] == pytest.approx(0.25)
        assert any("normalized" in str(w.message) for w in caught)

    def test_excluded_pairs_are_ungrammatical(self, tmp_path):
        path = tmp_path / "holes.game"
        path.write_text(
            json.dumps(
                {
                    "contents": [{"id": "a"}, {"id": "b"}],
                    "messages": [{"id": "m", "cost": 0.0}, {"id": "n", "cost": 0.1}],
                    "prior": {"a": 0.5, "b": 0.5},
                    "exclude": [["a", "n"]],
                }
            )
        )
        g = load_game(path)
        assert ("a", "n") not in g.edges
        assert ("b", "n") in g.edges

    def test_invalid_game_is_rejected_with_the_violation(self, tmp_path):
        path = tmp_path / "bad.game"
        path.write_text(
            json.dumps(
                {
                    "contents": [{"id": "a"}, {"id": "b"}],
                    "messages": [{"id": "m"}],
                    "prior": {"a": 0.5, "b": 0.5},
                    "sender_costs": {"a": {"m": 0.1}},
                    "receiver_costs": {"m": {"a": 0.1}},
                }
            )
        )
        with pytest.raises(ScenarioError, match="grammatical"):
            load_game(path)

    def test_round_trip_is_identical(self):
        rng = random.Random(21)
        for _ in range(25):
            g = random_valid_game(rng, max_size=3)
            again = parse_game(serialize_game(g)).game
            assert again == g
        g = load_game(
            __file__.replace("tests/test_io_cli.py", "src/meaning_games/data/fig2.game")
        )
        assert parse_game(serialize_game(g)).game == g

    def test_round_trip_preserves_bonus_overlap(self):
        from meaning_games import CompoundGame, ConstituentGame, Slot, flatten
        from generators import random_constituent

        rng = random.Random(22)
        cg = CompoundGame(
            (
                ConstituentGame(Slot("a"), random_constituent(rng, "a", False)),
                ConstituentGame(Slot("b"), random_constituent(rng, "b", False)),
            )
        )
        flat = flatten(cg).game
        assert parse_game(serialize_game(flat)).game == flat


class TestLoadDiscourse:
    def test_bundled_discourse(self, he_man_path):
        d = load_discourse(he_man_path)
        assert len(d.utterances) == 2
        assert d.utterances[0].is_resolved()
        assert [s.id for s in d.utterances[1].slots()] == ["u2_subj", "u2_obj"]

    def test_unknown_tags_rejected(self, tmp_path):
        path = tmp_path / "bad.disc"
        path.write_text(
            json.dumps(
                {
                    "entities": [{"id": "a"}],
                    "utterances": [
                        {
                            "realizations": [
                                {
                                    "entity": "a",
                                    "function": "topic",
                                    "form": "pronoun",
                                    "surface": "it",
                                }
                            ]
                        }
                    ],
                }
            )
        )
        with pytest.raises(ScenarioError, match="topic"):
            load_discourse(path)

    def test_no_slots_is_fine(self, tmp_path):
        path = tmp_path / "plain.disc"
        path.write_text(
            json.dumps(
                {
                    "entities": [{"id": "a"}],
                    "utterances": [
                        {
                            "realizations": [
                                {
                                    "entity": "a",
                                    "function": "subject",
                                    "form": "proper_name",
                                    "surface": "A",
                                }
                            ]
                        }
                    ],
                }
            )
        )
        d = load_discourse(path)
        assert all(u.is_resolved() for u in d.utterances)

    def test_incompatible_candidates_named(self, tmp_path):
        path = tmp_path / "mismatch.disc"
        path.write_text(
            json.dumps(
                {
                    "entities": [
                        {"id": "ann", "features": {"gender": "female"}},
                        {"id": "max", "features": {"gender": "male"}},
                    ],
                    "utterances": [
                        {
                            "realizations": [
                                {
                                    "slot": "s1",
                                    "function": "subject",
                                    "surface": "he",
                                    "options": [
                                        {
                                            "surface": "he",
                                            "form": "pronoun",
                                            "requires": {"gender": "male"},
                                        }
                                    ],
                                    "candidates": ["ann", "max"],
                                }
                            ]
                        }
                    ],
                }
            )
        )
        with pytest.raises(ScenarioError, match="s1"):
            load_discourse(path)

    def test_form_cost_ordering_enforced(self, tmp_path):
        path = tmp_path / "costs.disc"
        path.write_text(
            json.dumps(
                {
                    "entities": [{"id": "a"}],
                    "form_costs": {"pronoun": 0.9, "definite_np": 0.5},
                    "utterances": [],
                }
            )
        )
        with pytest.raises(ScenarioError, match="pronoun"):
            load_discourse(path)


class TestCli:
    def test_predict_bundled_game(self, fig2_path, capsys):
        code = main(["predict", "--game", str(fig2_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "he: fred" in out
        assert "the man: max" in out

    def test_solve_reports_all_equilibria(self, fig2_path, capsys):
        code = main(["solve", "--game", str(fig2_path), "--format", "machine"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        assert payload["count"] == 3
        kinds = {e["kind"] for e in payload["equilibria"]}
        assert kinds == {"separating", "pooling"}

    def test_pareto_keeps_one(self, fig2_path, capsys):
        code = main(["pareto", "--game", str(fig2_path), "--format", "machine"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        assert payload["count"] == 1

    def test_resolve_reports_violation_and_attribution(self, man_him_path, capsys):
        code = main(["resolve", "--discourse", str(man_him_path), "--format", "machine"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        by_slot = {a["slot"]: a for a in payload["assignments"]}
        assert by_slot["u2_subj"]["entity"] == "fred"
        assert by_slot["u2_obj"]["entity"] == "max"
        assert "parallelism" in by_slot["u2_subj"]["via"]
        assert len(payload["rule1_violations"]) == 1

    def test_resolve_without_parallelism_restores_the_matched_reading(
        self, man_him_path, capsys
    ):
        code = main(
            [
                "resolve",
                "--discourse",
                str(man_him_path),
                "--parallelism",
                "0",
                "--format",
                "machine",
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        by_slot = {a["slot"]: a for a in payload["assignments"]}
        assert by_slot["u2_subj"]["entity"] == "max"
        assert by_slot["u2_obj"]["entity"] == "fred"
        assert payload["rule1_violations"] == []

    def test_machine_output_is_byte_stable(self, man_him_path, capsys):
        outputs = []
        for _ in range(2):
            main(["resolve", "--discourse", str(man_him_path), "--format", "machine"])
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]

    def test_ambiguous_prediction_exit_code(self, tmp_path, capsys):
        path = tmp_path / "sym.game"
        path.write_text(
            json.dumps(
                {
                    "contents": [{"id": "a"}, {"id": "b"}],
                    "messages": [{"id": "m", "cost": 0.1}, {"id": "n", "cost": 0.1}],
                    "prior": {"a": 0.5, "b": 0.5},
                }
            )
        )
        assert main(["predict", "--game", str(path)]) == 3

    def test_parse_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "junk.game"
        path.write_text("{nope")
        assert main(["validate", "--game", str(path)]) == 1
        err = capsys.readouterr().err
        assert "junk.game" in err

    def test_missing_file_exit_code(self, tmp_path, capsys):
        assert main(["predict", "--game", str(tmp_path / "absent.game")]) == 1

    def test_level_k_command(self, fig2_path, capsys):
        code = main(
            ["levelk", "--game", str(fig2_path), "--depth", "3", "--format", "machine"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        assert payload["fixed_point_level"] == 0
        assert payload["fixed_profile_is_equilibrium"] is True
        assert len(payload["levels"]) == 4

    def test_explain_command(self, fig2_path, capsys):
        code = main(["explain", "--game", str(fig2_path), "--format", "machine"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        assert payload["decomposition"]["gap"] == pytest.approx(0.1)

    def test_compound_command(self, man_him_path, capsys):
        code = main(
            ["compound", "--discourse", str(man_him_path), "--format", "machine"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        section = payload["sections"]["2"]
        assert not section["ambiguous"]
        flags = {a["slot"]: a["locally_optimal"] for a in section["constituents"][0]}
        assert flags == {"sentence": True, "u2_subj": False, "u2_obj": False}
        readings = section["slot_readings"][0]
        assert readings["u2_subj"] == {"the man": "fred"}
        assert readings["u2_obj"] == {"him": "max"}
        assert readings["sentence"] == {"man_angry_him": "angry_fred_max"}

    def test_out_writes_machine_report(self, fig2_path, tmp_path, capsys):
        target = tmp_path / "report.json"
        code = main(["predict", "--game", str(fig2_path), "--out", str(target)])
        assert code == 0
        data = json.loads(target.read_text())
        assert data["command"] == "predict"

    def test_cap_environment_variable(self, fig2_path, capsys, monkeypatch):
        monkeypatch.setenv("MEANING_GAMES_CAP", "3")
        assert main(["solve", "--game", str(fig2_path)]) == 1
        assert "cap" in capsys.readouterr().err

    def test_validate_discourse(self, he_man_path, capsys):
        code = main(
            ["validate", "--discourse", str(he_man_path), "--format", "machine"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        assert payload["unresolved_slots"] == ["u2_subj", "u2_obj"]

"""Tests for the game data model, per-round loss, protocol, and conversions."""

import io
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bibalance.adversaries import ConstantGambler, GreedyGambler, ProportionalGambler
from bibalance.errors import DomainError, ProtocolError
from bibalance.game import (
    GameConfig,
    LossVector,
    Transcript,
    game_loss,
    house_gain,
    play_game,
    round_loss,
)
from bibalance.strategies import OptimalDecisiveHouse, OptimalHouse, UniformHouse

SQRT2 = math.sqrt(2.0)


class TestRoundLoss:
    def test_full_bet_at_even_odds(self):
        lv = round_loss(0.5, 1.0)
        assert lv.as_tuple() == (0.0, 2.0)

    def test_proportional_bet_is_unit_vector(self):
        lv = round_loss(0.5, 0.5)
        assert lv.as_tuple() == (1.0, 1.0)

    def test_zero_bet_quarter_odds(self):
        lv = round_loss(0.25, 0.0)
        assert lv.l0 == pytest.approx(4.0 / 3.0, rel=1e-15)
        assert lv.l1 == 0.0

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.1, 1.1])
    def test_boundary_odds_rejected(self, r):
        with pytest.raises(DomainError):
            round_loss(r, 0.5)

    @pytest.mark.parametrize("q", [-0.01, 1.01])
    def test_out_of_range_bet_rejected(self, q):
        with pytest.raises(DomainError):
            round_loss(0.5, q)

    @given(st.floats(0.01, 0.99))
    def test_matching_bet_gives_exact_unit_loss(self, r):
        assert round_loss(r, r).as_tuple() == (1.0, 1.0)

    @given(st.floats(0.001, 0.999), st.floats(0.0, 1.0))
    def test_components_nonnegative(self, r, q):
        lv = round_loss(r, q)
        assert lv.l0 >= 0.0 and lv.l1 >= 0.0


class TestPlayGame:
    def test_uniform_house_all_ones(self):
        tr = play_game(UniformHouse(3), ConstantGambler(1.0), GameConfig(3))
        assert tr.accumulated.as_tuple() == (0.0, 6.0)

    def test_optimal_house_decisive_gamblers_t2(self):
        target = 2.0 + SQRT2
        for gambler in (ConstantGambler(0.0), ConstantGambler(1.0), GreedyGambler(2)):
            tr = play_game(OptimalDecisiveHouse(2), gambler.clone(), GameConfig(2))
            assert game_loss(tr) == pytest.approx(target, rel=1e-12)

    def test_optimal_house_proportional_t5(self):
        tr = play_game(OptimalHouse(5), ProportionalGambler(), GameConfig(5))
        assert tr.accumulated.as_tuple() == (5.0, 5.0)

    def test_house_domain_violation_reports_round(self):
        class BadHouse(UniformHouse):
            def _odds(self, q_prev):
                return 0.5 if self._served < 2 else 1.5

        with pytest.raises(ProtocolError) as err:
            play_game(BadHouse(4), ConstantGambler(1.0), GameConfig(4))
        assert err.value.round_index == 3
        assert err.value.side == "house"

    def test_gambler_domain_violation_reports_round(self):
        class BadGambler(ConstantGambler):
            def next_bet(self, r):
                return 2.0

        with pytest.raises(ProtocolError) as err:
            play_game(UniformHouse(2), BadGambler(0.5), GameConfig(2))
        assert err.value.round_index == 1
        assert err.value.side == "gambler"

    def test_house_sees_only_past_bets(self):
        seen = []

        class Spy(UniformHouse):
            def _odds(self, q_prev):
                seen.append(q_prev)
                return 0.5

        play_game(Spy(3), ConstantGambler(0.25), GameConfig(3))
        assert seen == [None, 0.25, 0.25]


class TestGameLoss:
    def test_max_component(self):
        tr = play_game(UniformHouse(3), ConstantGambler(1.0), GameConfig(3))
        assert game_loss(tr) == 6.0

    def test_equal_components(self):
        assert LossVector(2.0 + SQRT2, 2.0 + SQRT2).max_component() == 2.0 + SQRT2

    def test_plain_max(self):
        assert LossVector(3.1, 4.9).max_component() == 4.9

    def test_incomplete_transcript_rejected(self):
        tr = Transcript(GameConfig(5), ((0.5, 1.0),), LossVector(0.0, 2.0))
        with pytest.raises(DomainError):
            game_loss(tr)

    def test_monotone_in_rounds(self):
        config = GameConfig(6)
        tr = play_game(OptimalDecisiveHouse(6), GreedyGambler(6), config)
        l0 = l1 = 0.0
        for r, q in tr.rounds:
            step = round_loss(r, q)
            assert step.l0 >= 0.0 and step.l1 >= 0.0
            l0 += step.l0
            l1 += step.l1
        assert (l0, l1) == tr.accumulated.as_tuple()


class TestHouseGain:
    def test_breakeven_overround(self):
        T = 49
        loss = T + math.sqrt(T)
        gamma = 1.0 + T ** (-0.5)
        assert house_gain(loss, GameConfig(T, gamma)) == pytest.approx(0.0, abs=1e-12)

    def test_simple_arithmetic(self):
        assert house_gain(6.0, GameConfig(4, 2.0)) == 1.0

    def test_fair_book_deficit(self):
        assert house_gain(110.0, GameConfig(100, 1.0)) == pytest.approx(-10.0, rel=1e-12)

    @given(st.integers(1, 50), st.floats(1.0, 3.0))
    def test_zero_at_full_overround_loss(self, T, gamma):
        assert house_gain(T * gamma, GameConfig(T, gamma)) == pytest.approx(0.0, abs=1e-9)

    def test_negative_loss_rejected(self):
        with pytest.raises(DomainError):
            house_gain(-1.0, GameConfig(2))


class TestConfigValidation:
    @pytest.mark.parametrize("T", [0, -1, 2.5])
    def test_bad_horizon(self, T):
        with pytest.raises(DomainError):
            GameConfig(T)

    def test_bad_overround(self):
        with pytest.raises(DomainError):
            GameConfig(3, 0.5)


class TestTranscriptSerialization:
    @pytest.fixture
    def transcript(self):
        return play_game(OptimalDecisiveHouse(4), GreedyGambler(4), GameConfig(4, 1.25))

    def test_json_roundtrip(self, transcript):
        back = Transcript.from_json(transcript.to_json())
        assert back == transcript

    def test_json_schema(self, transcript):
        obj = json.loads(transcript.to_json())
        assert set(obj) == {"T", "gamma", "rounds", "loss"}
        assert obj["T"] == 4
        assert obj["gamma"] == 1.25
        assert len(obj["rounds"]) == 4
        assert obj["loss"] == [transcript.accumulated.l0, transcript.accumulated.l1]

    def test_recompute_matches_exactly(self, transcript):
        assert transcript.recompute_accumulated() == transcript.accumulated

    def test_csv_rows(self, transcript):
        buf = io.StringIO()
        transcript.write_csv(buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "t,r,q,l0_cum,l1_cum"
        assert len(lines) == 5
        last = lines[-1].split(",")
        assert int(last[0]) == 4
        assert float(last[3]) == transcript.accumulated.l0
        assert float(last[4]) == transcript.accumulated.l1

    def test_too_many_rounds_rejected(self):
        with pytest.raises(DomainError):
            Transcript(GameConfig(1), ((0.5, 1.0), (0.5, 1.0)), LossVector(0.0, 4.0))

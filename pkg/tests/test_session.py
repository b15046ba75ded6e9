import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from mmbayes.distributions import BetaParams
from mmbayes.session import (
    RuleViolation,
    SessionNotFound,
    SessionStore,
    export_csv,
    normalize_counts,
    parse_tally_csv,
    posterior_view,
    replay,
    reveal_report,
)

FULL = {"blue": 5, "orange": 4, "green": 3, "yellow": 2, "red": 1, "brown": 6}


@pytest.fixture
def store(tmp_path):
    return SessionStore(tmp_path, fsync=False)


def locked_session(store, prior=(2, 9)):
    s = store.create_session()
    store.set_prior(s.id, BetaParams(*prior))
    store.lock_prior(s.id)
    return store.get(s.id)


class TestLifecycle:
    def test_create_then_get(self, store):
        s = store.create_session()
        assert store.get(s.id).id == s.id
        assert not s.prior_locked and not s.revealed and not s.bags

    def test_unknown_session(self, store):
        with pytest.raises(SessionNotFound):
            store.get("nope")

    def test_prior_can_change_until_locked(self, store):
        s = store.create_session()
        store.set_prior(s.id, BetaParams(1, 1))
        store.set_prior(s.id, BetaParams(2, 9))
        store.lock_prior(s.id)
        assert store.get(s.id).prior == BetaParams(2, 9)
        with pytest.raises(RuleViolation) as e:
            store.set_prior(s.id, BetaParams(3, 7))
        assert e.value.rule == "prior_locked"

    def test_lock_requires_prior(self, store):
        s = store.create_session()
        with pytest.raises(RuleViolation) as e:
            store.lock_prior(s.id)
        assert e.value.rule == "prior_not_set"

    def test_double_lock_conflict(self, store):
        s = locked_session(store)
        with pytest.raises(RuleViolation) as e:
            store.lock_prior(s.id)
        assert e.value.rule == "already_locked"

    def test_add_bag_before_lock_rejected(self, store):
        s = store.create_session()
        store.set_prior(s.id, BetaParams(2, 9))
        with pytest.raises(RuleViolation) as e:
            store.add_bag(s.id, "b1", FULL)
        assert e.value.rule == "prior_not_locked"

    def test_duplicate_bag_id_rejected(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        with pytest.raises(RuleViolation) as e:
            store.add_bag(s.id, "b1", FULL)
        assert e.value.rule == "duplicate_bag_id"

    def test_empty_bag_rejected(self, store):
        s = locked_session(store)
        with pytest.raises(RuleViolation) as e:
            store.add_bag(s.id, "b1", {"blue": 0, "other": 0})
        assert e.value.rule == "bag_total_positive"

    def test_reveal_needs_bags(self, store):
        s = locked_session(store)
        with pytest.raises(RuleViolation) as e:
            store.reveal(s.id)
        assert e.value.rule == "no_bags"

    def test_reveal_idempotent(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        first = store.reveal(s.id)
        second = store.reveal(s.id)
        assert first.revealed and second.revealed
        assert second.sequence == first.sequence  # no extra event


class TestCounts:
    def test_normalize_full(self):
        assert normalize_counts(FULL) == FULL

    def test_normalize_blue_total(self):
        assert normalize_counts(blue=3, total=10) == {"blue": 3, "other": 7}
        assert normalize_counts({"blue": 3, "total": 10}) == {"blue": 3, "other": 7}

    def test_rejects_unknown_colours(self):
        with pytest.raises(ValueError):
            normalize_counts({"blue": 1, "purple": 2})

    def test_rejects_negative_and_nonint(self):
        with pytest.raises(ValueError):
            normalize_counts(blue=-1, total=3)
        with pytest.raises(ValueError):
            normalize_counts(blue=5, total=3)
        bad = dict(FULL)
        bad["red"] = 1.5
        with pytest.raises(ValueError):
            normalize_counts(bad)


class TestPosteriorView:
    def test_class_fixture(self, store):
        s = locked_session(store, prior=(2, 9))
        store.add_bag(s.id, "b1", {"blue": 10, "total": 40})
        store.add_bag(s.id, "b2", {"blue": 15, "total": 60})
        view = posterior_view(store.get(s.id), "class")
        assert view.posterior.params == BetaParams(27, 84)
        assert view.summary.mean == pytest.approx(27 / 111, abs=1e-14)
        assert len(view.grid) == 512

    def test_zero_bags_returns_prior(self, store):
        s = locked_session(store, prior=(3, 7))
        view = posterior_view(store.get(s.id), "class")
        assert view.posterior.params == BetaParams(3, 7)

    def test_single_bag_scope(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", {"blue": 4, "total": 20})
        store.add_bag(s.id, "b2", {"blue": 9, "total": 30})
        view = posterior_view(store.get(s.id), "b1")
        assert view.posterior.params == BetaParams(6, 25)

    def test_unknown_bag_scope(self, store):
        s = locked_session(store)
        with pytest.raises(SessionNotFound):
            posterior_view(store.get(s.id), "ghost")

    def test_read_does_not_mutate(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        before = [e.to_json() for e in store.events(s.id)]
        posterior_view(store.get(s.id), "class")
        after = [e.to_json() for e in store.events(s.id)]
        assert before == after

    def test_pooling_equals_sequential(self, store):
        s = locked_session(store, prior=(3, 7))
        parts = [(3, 11), (0, 4), (7, 30), (15, 55)]
        for i, (blue, total) in enumerate(parts):
            store.add_bag(s.id, f"b{i}", {"blue": blue, "total": total})
        view = posterior_view(store.get(s.id), "class")
        prior = BetaParams(3, 7)
        from mmbayes.conjugate import update_beta_binomial
        from mmbayes.distributions import CountVector
        seq = prior
        for blue, total in parts:
            seq = update_beta_binomial(seq, CountVector.from_successes(blue, total)).params
        assert view.posterior.params == seq


class TestReveal:
    def test_report_fixture(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", {"blue": 25, "total": 100}, lot_code="LOT HKP 5")
        store.reveal(s.id)
        report = reveal_report(store.get(s.id))
        assert report.factory_names == ("New Jersey", "Tennessee")
        assert report.probabilities[0] == pytest.approx(0.631, abs=5e-4)
        assert report.lot_codes[0]["factory"] == "New Jersey"
        assert report.pooled_blue == 25 and report.pooled_total == 100

    def test_unknown_lot_code_reported(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        report = reveal_report(store.get(s.id))
        assert report.lot_codes[0]["factory"] is None
        assert report.lot_codes[0]["reason"]


class TestEventSourcing:
    def test_log_file_lines_are_json(self, tmp_path):
        store = SessionStore(tmp_path, fsync=True)
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        path = tmp_path / f"{s.id}.events.jsonl"
        lines = path.read_text().splitlines()
        assert len(lines) == 4  # created, prior_set, prior_locked, bag_added
        kinds = [json.loads(l)["kind"] for l in lines]
        assert kinds == ["created", "prior_set", "prior_locked", "bag_added"]

    def test_replay_reconstructs_exactly(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL, lot_code="CLV")
        store.add_bag(s.id, "b2", {"blue": 3, "total": 9})
        store.reveal(s.id)
        live = store.get(s.id)
        rebuilt = replay(store.events(s.id))
        assert rebuilt == live

    def test_replay_from_disk(self, tmp_path):
        store = SessionStore(tmp_path, fsync=True)
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        assert store.replay_from_disk(s.id) == store.get(s.id)

    def test_store_reload_picks_up_sessions(self, tmp_path):
        store = SessionStore(tmp_path, fsync=True)
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        fresh = SessionStore(tmp_path)
        assert fresh.get(s.id) == store.get(s.id)

    def test_gapless_sequences_enforced(self, store):
        s = locked_session(store)
        events = store.events(s.id)
        events[1].sequence = 5
        with pytest.raises(ValueError):
            replay(events)

    @settings(max_examples=40, deadline=None,
              suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(ops=st.lists(st.sampled_from(
        ["set_prior", "lock", "bag", "reveal"]), max_size=25))
    def test_random_operation_sequences_round_trip(self, tmp_path_factory, ops):
        store = SessionStore(tmp_path_factory.mktemp("fuzz"), fsync=False)
        s = store.create_session()
        bag_n = 0
        for op in ops:
            try:
                if op == "set_prior":
                    store.set_prior(s.id, BetaParams(2, 9))
                elif op == "lock":
                    store.lock_prior(s.id)
                elif op == "bag":
                    store.add_bag(s.id, f"b{bag_n}", {"blue": 1, "total": 4})
                    bag_n += 1
                else:
                    store.reveal(s.id)
            except RuleViolation:
                pass
        live = store.get(s.id)
        assert replay(store.events(s.id)) == live
        # invariants hold no matter the order of operations
        if live.bags:
            assert live.prior_locked
        if live.revealed:
            assert live.bags


class TestCsv:
    def test_parse_full_format(self):
        text = "bag_id,blue,orange,green,yellow,red,brown\nb1,5,4,3,2,1,6\nb2,0,1,0,2,0,0\n"
        rows = parse_tally_csv(text)
        assert rows[0] == ("b1", FULL)
        assert rows[1][1]["orange"] == 1

    def test_parse_blue_only_format(self):
        rows = parse_tally_csv("bag_id,blue,total\nb1,3,10\n")
        assert rows == [("b1", {"blue": 3, "other": 7})]

    def test_unknown_column_named_in_error(self):
        with pytest.raises(ValueError, match="purple"):
            parse_tally_csv("bag_id,blue,purple\nb1,1,2\n")

    def test_totals_column_rejected_in_full_format(self):
        text = "bag_id,blue,orange,green,yellow,red,brown,total\nb1,5,4,3,2,1,6,21\n"
        with pytest.raises(ValueError):
            parse_tally_csv(text)

    def test_non_integer_counts_rejected(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_tally_csv("bag_id,blue,total\nb1,x,10\n")

    def test_export_full_round_trip(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        text = export_csv(store.get(s.id))
        assert parse_tally_csv(text) == [("b1", FULL)]

    def test_export_falls_back_to_blue_only(self, store):
        s = locked_session(store)
        store.add_bag(s.id, "b1", FULL)
        store.add_bag(s.id, "b2", {"blue": 3, "total": 9})
        text = export_csv(store.get(s.id))
        assert text.splitlines()[0] == "bag_id,blue,total"
        assert parse_tally_csv(text) == [
            ("b1", {"blue": 5, "other": 16}), ("b2", {"blue": 3, "other": 6})]

# tests/test_campaign.py
"""
Tests for randomized verification campaigns.

Quick runs use a handful of seeds per check; --full-campaign runs the
acceptance-size campaigns.

Run:
    pytest tests/test_campaign.py -v
    pytest tests/test_campaign.py -v --full-campaign
"""
import asyncio

import pytest

from fv_system.errors import NoSliceFound
from fv_system.events import EventBus, VerificationEvents, event_bus
from fv_system.models.reports import TrialResult
from fv_system.services import campaign_service
from fv_system.services.campaign_service import CHECKS, TRIALS, CampaignService

SEED = 20240611


def run_campaign(check, trials, seed=SEED, workers=2):
    return asyncio.run(CampaignService(seed, workers=workers).run_check(check, trials))


@pytest.fixture
def recorded_events():
    """Collects campaign events emitted during the test."""
    seen = []

    def _record(data):
        seen.append(data)

    names = (VerificationEvents.CAMPAIGN_STARTED, VerificationEvents.TRIAL_COMPLETED,
             VerificationEvents.TRIAL_FAILED, VerificationEvents.CAMPAIGN_FINISHED)
    for name in names:
        event_bus.subscribe(name, _record)
    yield seen
    for name in names:
        event_bus.unsubscribe(name, _record)


# =============================================================================
# RANDOMIZED CHECKS
# =============================================================================

class TestRandomizedChecks:
    """Every trial of every check stays within tolerance."""

    @pytest.mark.parametrize("check", ["sorkin", "lemma1", "theorem2", "oracle"])
    def test_sized_check_passes(self, check, campaign_size):
        """TEST: Sized campaigns pass on every trial"""
        report = run_campaign(check, campaign_size(check))
        failures = [(t.index, t.details.get("error"), t.deviations) for t in report.trials if not t.passed]
        assert report.passed, failures

    @pytest.mark.parametrize("check", ["factorisation", "updates", "lightcone"])
    def test_structural_check_passes(self, check):
        """TEST: Factorisation, update algebra and light-cone checks pass"""
        report = run_campaign(check, 4)
        assert report.passed_count == 4

    def test_sorkin_alternates_charlie_modes(self):
        """TEST: Even trials use a local observable, odd trials a probe"""
        report = run_campaign("sorkin", 2)
        modes = [t.details["charlie_mode"] for t in report.trials]
        assert modes == ["local_observable", "probe"]

    def test_registry_matches_checks(self):
        """TEST: Every named check has a trial function"""
        assert set(TRIALS) == set(CHECKS)


# =============================================================================
# DETERMINISM
# =============================================================================

class TestDeterminism:
    """Reports depend on the seed only, never on scheduling."""

    def test_same_seed_same_report(self):
        """TEST: Two runs with one seed and different worker counts agree"""
        first = run_campaign("lightcone", 6, workers=1)
        second = run_campaign("lightcone", 6, workers=3)
        assert first.details() == second.details()

    def test_trials_sorted_by_index(self):
        """TEST: Trials are reduced in index order"""
        report = run_campaign("oracle", 3, workers=3)
        assert [t.index for t in report.trials] == [0, 1, 2]

    def test_different_seeds_differ(self):
        """TEST: Substream seeds depend on the campaign seed"""
        a = run_campaign("lightcone", 1, seed=1)
        b = run_campaign("lightcone", 1, seed=2)
        assert a.trials[0].seed != b.trials[0].seed


# =============================================================================
# FAILURE HANDLING
# =============================================================================

class TestFailureHandling:
    """Trial errors become failed results; unknown checks are refused."""

    def test_trial_error_recorded(self, monkeypatch):
        """TEST: A trial raising an FVError is reported, not propagated"""

        def _broken(index, seed, tol):
            raise NoSliceFound("lattice too shallow")

        monkeypatch.setitem(campaign_service.TRIALS, "lightcone", _broken)
        report = run_campaign("lightcone", 2)
        assert not report.passed
        assert report.passed_count == 0
        assert report.trials[0].details["error"] == "NoSliceFound: lattice too shallow"

    def test_unknown_check(self):
        """TEST: Unknown check names raise KeyError"""
        with pytest.raises(KeyError):
            run_campaign("bogus", 1)

    def test_empty_campaign_fails(self):
        """TEST: A campaign with no trials does not pass"""
        report = run_campaign("lightcone", 0)
        assert report.trials == []
        assert not report.passed


# =============================================================================
# EVENTS
# =============================================================================

class TestCampaignEvents:
    """Campaign progress goes through the event bus."""

    def test_events_emitted(self, recorded_events, monkeypatch):
        """TEST: started, one event per trial, finished"""

        def _trial(index, seed, tol):
            return TrialResult(index, seed, index != 1, {"gap": float(index)})

        monkeypatch.setitem(campaign_service.TRIALS, "lightcone", _trial)
        run_campaign("lightcone", 3)
        assert recorded_events[0] == {"check": "lightcone", "trials": 3, "seed": SEED}
        per_trial = sorted((e for e in recorded_events if "index" in e), key=lambda e: e["index"])
        assert [e["passed"] for e in per_trial] == [True, False, True]
        assert recorded_events[-1]["passed"] == 2
        assert recorded_events[-1]["worst"] == 2.0

    def test_logging_handlers_registered_once(self):
        """TEST: Repeated setup subscribes each logging handler once; teardown removes them"""
        from fv_system.events.handlers import handle_campaign_started
        from fv_system.events.setup import (
            setup_verification_event_handlers,
            teardown_verification_event_handlers,
        )

        setup_verification_event_handlers()
        setup_verification_event_handlers()
        try:
            handlers = event_bus.handlers(VerificationEvents.CAMPAIGN_STARTED)
            assert handlers.count(handle_campaign_started) == 1
        finally:
            teardown_verification_event_handlers()
        assert handle_campaign_started not in event_bus.handlers(VerificationEvents.CAMPAIGN_STARTED)

    def test_bus_dispatch(self):
        """TEST: Sync and async handlers both run; a failing handler does not stop delivery"""
        bus = EventBus()
        seen = []

        def _broken(data):
            raise RuntimeError("boom")

        async def _async(data):
            seen.append(("async", data["n"]))

        bus.subscribe(VerificationEvents.TRIAL_COMPLETED, _broken)
        bus.subscribe(VerificationEvents.TRIAL_COMPLETED, _async)
        bus.subscribe(VerificationEvents.TRIAL_COMPLETED, lambda data: seen.append(("sync", data["n"])))
        asyncio.run(bus.emit(VerificationEvents.TRIAL_COMPLETED, {"n": 1}))
        assert seen == [("async", 1), ("sync", 1)]

    def test_bus_rejects_unknown_event(self):
        """TEST: Only VerificationEvents names can be published"""
        with pytest.raises(ValueError):
            asyncio.run(EventBus().emit("purchase.completed", {}))

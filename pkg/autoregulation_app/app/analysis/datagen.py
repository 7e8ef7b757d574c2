"""
Synthetic subjects and cohorts with known (planted) answers.

A subject is a downward pressure step. Its velocity is the A-T response of the
planted ARI to the noiseless step, on a 60 cm/s baseline. Gaussian noise is
added to both signals from a single seeded generator: pressure noise is drawn
first, then velocity noise, so a subject is fully determined by its spec.

Hypercapnia is only a lower planted ARI; no CO2 physiology is modelled.
"""
from typing import Iterable, List, Optional, Sequence, Set, Tuple
from pathlib import Path
import json
import numpy as np
from errors import CohortError, FileFormatError
from logger import logger
from analysis.aaslid_tiecks import STANDARD_TABLE, at_simulate
from analysis.signal import normalize_pressure, save_subject_csv
from schemas.datagen_schema import CohortManifest, CohortManifestEntry, SynthSpec
from schemas.fir_schema import FirCoefficients
from schemas.signal_schema import CapnicState, NormalizationParams, SampledSignal, SubjectRecord

VELOCITY_BASELINE = 60.0 # cm/s
NORMO_ARI_RANGE = (6, 9) # inclusive
SEED_LIMIT = 2**31

RecordPair = Tuple[SubjectRecord, SubjectRecord]

########################
### SINGLE SUBJECTS ###
########################

def _step_core(spec: SynthSpec) -> SampledSignal:
    n = int(round(spec.duration * spec.fs))
    t = np.arange(n) / spec.fs
    core = np.where(t < spec.step_time, spec.baseline_pressure, spec.baseline_pressure * (1.0 - spec.step_drop))
    return SampledSignal(samples=core, fs=spec.fs, label="abp")

def _noise(spec: SynthSpec, n: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(spec.seed)
    pressure_noise = rng.normal(0.0, spec.noise_sigma * spec.baseline_pressure, n)
    velocity_noise = rng.normal(0.0, spec.noise_sigma, n)
    return pressure_noise, velocity_noise

def _core_dP(spec: SynthSpec, core: SampledSignal) -> SampledSignal:
    return normalize_pressure(core, NormalizationParams(p_base=spec.baseline_pressure, crcp=0.0))

def synth_pressure(spec: SynthSpec) -> SampledSignal:
    """Baseline pressure until step_time, the dropped level after it, plus seeded noise."""
    core = _step_core(spec)
    pressure_noise, _ = _noise(spec, len(core))
    return core.derive(core.samples + pressure_noise)

def _record(spec: SynthSpec, subject_id: str, core: SampledSignal, v: np.ndarray) -> SubjectRecord:
    pressure_noise, velocity_noise = _noise(spec, len(core))
    return SubjectRecord(
        id=subject_id,
        state=spec.state,
        abp=core.derive(core.samples + pressure_noise),
        cbfv=core.derive(VELOCITY_BASELINE * (v + velocity_noise), label="cbfv")
    )

def synth_subject(spec: SynthSpec, subject_id: str = "S01") -> SubjectRecord:
    """Record whose velocity follows the template of spec.true_ari."""
    core = _step_core(spec)
    v = at_simulate(_core_dP(spec, core), STANDARD_TABLE.params(spec.true_ari))
    return _record(spec, subject_id, core, v.samples)

def synth_fir_subject(spec: SynthSpec, h: FirCoefficients, subject_id: str = "S01") -> SubjectRecord:
    """
    Record whose velocity change follows a planted 7-tap relation:
    v / v_base - 1 = sum_k h[k] dP(i - k), with dP taken as 0 before the recording.
    spec.true_ari is ignored.
    """
    core = _step_core(spec)
    dP = _core_dP(spec, core).samples
    change = np.convolve(dP, h.as_array())[:dP.size]
    return _record(spec, subject_id, core, 1.0 + change)

###############
### COHORTS ###
###############

def _subject_id(index: int) -> str:
    return f"S{index + 1:02d}"

def plan_cohort(
    n_subjects: int,
    hyper_drop_choices: Iterable[int] = (0, 1, 2),
    anomaly_index: Optional[int] = None,
    seed: int = 0,
    noise_sigma: float = 0.0
) -> CohortManifest:
    """
    Draw planted ARIs for a cohort.

    Normocapnia ARI comes from 6..9 and hypercapnia is normo - drop (not below 0).
    The subject at anomaly_index (0-based) instead gets hyper = normo + 1, with
    normo drawn from 6..8 so the increase stays on the scale.

    Raises:
    - CohortError: n_subjects < 1, anomaly_index out of range, or unusable drop choices
    """
    if n_subjects < 1:
        raise CohortError(f"A cohort needs at least one subject, got {n_subjects}")
    if anomaly_index is not None and not 0 <= anomaly_index < n_subjects:
        raise CohortError(f"anomaly index {anomaly_index} out of range for {n_subjects} subjects")
    drops = sorted(set(hyper_drop_choices))
    if not drops or drops[0] < 0:
        raise CohortError("Hypercapnia drop choices must be a non-empty set of non-negative integers")

    rng = np.random.default_rng(seed)
    low, high = NORMO_ARI_RANGE
    entries: List[CohortManifestEntry] = []
    for i in range(n_subjects):
        if i == anomaly_index:
            normo = int(rng.integers(low, high))
            hyper = normo + 1
        else:
            normo = int(rng.integers(low, high + 1))
            hyper = max(normo - int(rng.choice(drops)), 0)
        normo_seed, hyper_seed = (int(s) for s in rng.integers(0, SEED_LIMIT, size=2))
        entries.append(CohortManifestEntry(subject_id=_subject_id(i), state=CapnicState.NORMOCAPNIA, planted_ari=normo, seed=normo_seed))
        entries.append(CohortManifestEntry(subject_id=_subject_id(i), state=CapnicState.HYPERCAPNIA, planted_ari=hyper, seed=hyper_seed))
    return CohortManifest(seed=seed, noise_sigma=noise_sigma, entries=entries)

def plan_from_pairs(planted: Sequence[Tuple[int, int]], seed: int = 0, noise_sigma: float = 0.0) -> CohortManifest:
    """Manifest for explicit (normo, hyper) ARI pairs, subject i gets id S{i+1:02d}."""
    rng = np.random.default_rng(seed)
    entries: List[CohortManifestEntry] = []
    for i, (normo, hyper) in enumerate(planted):
        normo_seed, hyper_seed = (int(s) for s in rng.integers(0, SEED_LIMIT, size=2))
        entries.append(CohortManifestEntry(subject_id=_subject_id(i), state=CapnicState.NORMOCAPNIA, planted_ari=normo, seed=normo_seed))
        entries.append(CohortManifestEntry(subject_id=_subject_id(i), state=CapnicState.HYPERCAPNIA, planted_ari=hyper, seed=hyper_seed))
    return CohortManifest(seed=seed, noise_sigma=noise_sigma, entries=entries)

def synth_cohort_from_plan(manifest: CohortManifest, base: Optional[SynthSpec] = None) -> List[RecordPair]:
    """(normo, hyper) record pairs in manifest order; base supplies the step shape."""
    base = base or SynthSpec()
    by_subject = {}
    for entry in manifest.entries:
        spec = base.model_copy(update={
            "true_ari": entry.planted_ari,
            "seed": entry.seed,
            "state": entry.state,
            "noise_sigma": manifest.noise_sigma
        })
        states = by_subject.setdefault(entry.subject_id, {})
        if entry.state in states:
            raise CohortError(f"Subject {entry.subject_id} has two {entry.state.value} entries")
        states[entry.state] = synth_subject(spec, entry.subject_id)

    pairs = []
    for subject_id, states in by_subject.items():
        if len(states) != 2:
            raise CohortError(f"unmatched pair: subject {subject_id} lacks one of the two states")
        pairs.append((states[CapnicState.NORMOCAPNIA], states[CapnicState.HYPERCAPNIA]))
    logger.info(f"Synthesized {len(pairs)} subject pairs (noise_sigma={manifest.noise_sigma})")
    return pairs

def synth_cohort(
    n_subjects: int,
    hyper_drop_choices: Set[int] = frozenset({0, 1, 2}),
    anomaly_index: Optional[int] = None,
    seed: int = 0,
    noise_sigma: float = 0.0,
    base: Optional[SynthSpec] = None
) -> List[RecordPair]:
    """Planned and synthesized cohort in one call."""
    return synth_cohort_from_plan(plan_cohort(n_subjects, hyper_drop_choices, anomaly_index, seed, noise_sigma), base)

#################
### MANIFESTS ###
#################

def record_file_name(subject_id: str, state: CapnicState) -> str:
    return f"{subject_id}_{state.value}.csv"

def write_cohort(manifest: CohortManifest, pairs: Sequence[RecordPair], directory: Path) -> CohortManifest:
    """Write one CSV per record plus manifest.json; returns the manifest with file names filled in."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for normo, hyper in pairs:
        for record in (normo, hyper):
            with open(directory / record_file_name(record.id, record.state), "w", encoding="utf-8", newline="") as f:
                save_subject_csv(record, f)
    manifest = manifest.model_copy(update={"entries": [
        entry.model_copy(update={"file": record_file_name(entry.subject_id, entry.state)})
        for entry in manifest.entries
    ]})
    (directory / "manifest.json").write_text(manifest_to_json(manifest) + "\n", encoding="utf-8")
    return manifest

def manifest_to_json(manifest: CohortManifest) -> str:
    return manifest.model_dump_json(indent=2)

def manifest_from_json(text: str) -> CohortManifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"Cohort manifest is not valid JSON: {e}")
    return CohortManifest.model_validate(data)

# mock_data.py

from analysis.datagen import plan_from_pairs, synth_cohort_from_plan
from schemas.datagen_schema import CohortManifest

# (normocapnia, hypercapnia) ARI of the 16 volunteers, subject 1 first
reference_pairs = [
    (8, 8), (8, 8), (8, 6), (8, 8), (7, 7), (8, 8), (7, 6), (8, 7),
    (9, 8), (8, 8), (7, 6), (7, 6), (7, 7), (6, 7), (8, 8), (8, 8),
]

reference_anomalous_subject = "S14"

def reference_manifest(seed: int = 0, noise_sigma: float = 0.0) -> CohortManifest:
    return plan_from_pairs(reference_pairs, seed=seed, noise_sigma=noise_sigma)

def reference_cohort(seed: int = 0, noise_sigma: float = 0.0):
    """Synthetic record pairs planted with the reference cohort indices."""
    return synth_cohort_from_plan(reference_manifest(seed, noise_sigma))

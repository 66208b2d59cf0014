"""
Coupling between channels raises joint determinism
==================================================

Two chaotic logistic maps, each observed through its own noisy channel,
are diffusively coupled with strength mu.  At mu=0 the channels are
independent; as mu grows they synchronize.  A joint recurrence plot
(the pointwise AND of the per-channel recurrence plots) recurs only
when both channels revisit their own past simultaneously, so any real
coupling lifts its determinism JDET far above the independent baseline.
"""

import numpy as np

from jrpnet.config import PipelineConfig
from jrpnet.ingest import segment_windows, zscore_channels
from jrpnet.netbuild import channel_graph
from jrpnet.pipeline import estimate_trial_embeddings
from jrpnet.synth import CouplingSpec, generate

config = PipelineConfig(tau_max=16, m_max=6)

print("  mu    sync error   JDET(a,b)")
for mu in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5):
    spec = CouplingSpec(
        n_channels=2,
        modality_map={"a": "EEG", "b": "EMG"},
        coupling_matrix=np.array([[0.0, mu], [mu, 0.0]]),
        noise_sd=0.05,
        length_samples=1280,
        sampling_rate_hz=128.0,
        seed=42,
        trial_id=f"mu_{mu:.1f}",
    )
    recording = generate(spec)

    # Mean absolute gap between the raw traces.  Diffusive coupling at
    # mu=0.5 averages the two maps into lockstep after one step, so the
    # residual gap there is just the observation noise.
    gap = float(np.mean(np.abs(recording.channel("a") - recording.channel("b"))))

    # One full-trial window, embedding parameters estimated per channel
    # from the data, then the joint-determinism edge weight.
    zscored = zscore_channels(recording)
    window = segment_windows(zscored, window_s=10.0, overlap_fraction=0.0)[0]
    embeddings = estimate_trial_embeddings(recording, config)
    graph = channel_graph(window, embeddings, metric="JDET")
    print(f"  {mu:.1f}   {gap:9.4f}   {graph.weights[0, 1]:8.3f}")

print()
print("any nonzero coupling lifts JDET an order of magnitude above mu=0;")
print("once the maps synchronize the weight is set by observation noise,")
print("not by mu, so the plateau past mu=0.2 is expected")

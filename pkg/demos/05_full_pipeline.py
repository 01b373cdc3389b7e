"""The five-step pipeline end to end, with the percent non-overlap metric.

Equivalent CLI:
    lvseg phantom --out clipdir --seed 7
    lvseg segment --clip clipdir --out seg.json
    lvseg eval --result seg.json --truth clipdir/ground_truth.json --out report.json
"""

from pathlib import Path

from lvseg import PhantomSpec, PipelineConfig, evaluate_clip, generate_phantom, segment_clip
from lvseg.evaluation import write_report

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

clip, gt = generate_phantom(PhantomSpec(seed=7, speckle_sigma=6.0))
cfg = PipelineConfig()
result = segment_clip(clip, cfg)
report = evaluate_clip(result, gt)

print(f"params fingerprint {result.params_fingerprint}")
print(
    f"percent error: initial {report['initial_mean_pct_error']:.4f} "
    f"-> refined {report['mean_pct_error']:.4f} "
    f"(+/- {report['std_pct_error']:.4f})"
)
for k, e in enumerate(report["per_frame"]):
    a = report["anchor_errors"][k]
    print(f"  frame {k:2d}: pct {e:.4f}  anchors "
          f"septal {a['septal']:.1f} lateral {a['lateral']:.1f} apex {a['apex']:.1f}")

result.save(out_dir / "segmentation.json")
write_report(report, out_dir / "report.json", out_dir / "report.csv")
print(f"wrote {out_dir / 'segmentation.json'}, report.json, report.csv")

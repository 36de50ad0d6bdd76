"""
Class separability
==================

Two groups of images are compared through the ratio of the distance
between class means to the average within-class spread. The first block
reuses published dimension values for two manuscript letter classes; the
second runs the full harness on synthetic classes.
"""

import json
import os
import tempfile

from fracdim import load_manifest, run_manifest, salt_pepper, separability, sierpinski_triangle, write_image

hfd = separability({"notabilior": [1.5804, 1.6091], "capital": [1.5482, 1.3863]})
mhfd = separability({"notabilior": [1.5078, 1.5335], "capital": [1.4472, 1.2794]})
print(f"HFD : intra={hfd.intra:.4f} inter={hfd.inter:.4f} ratio={hfd.ratio:.3f}")
print(f"MHFD: intra={mhfd.intra:.4f} inter={mhfd.inter:.4f} ratio={mhfd.ratio:.3f}")

with tempfile.TemporaryDirectory() as tmp:
    images = {
        "tri7.pbm": sierpinski_triangle(7),
        "tri8.pbm": sierpinski_triangle(8),
        "noise3.pbm": salt_pepper(256, 256, 0.3, seed=1),
        "noise4.pbm": salt_pepper(256, 256, 0.4, seed=2),
    }
    for name, img in images.items():
        write_image(os.path.join(tmp, name), img)
    for steps in ([], ["denoise"]):
        opts = {"preprocess_steps": steps, "filter": {"mode": "expectation"}}
        manifest = {"classes": {
            "fractal": [{"path": "tri7.pbm", "options": opts}, {"path": "tri8.pbm", "options": opts}],
            "noise": [{"path": "noise3.pbm", "options": opts}, {"path": "noise4.pbm", "options": opts}],
        }}
        path = os.path.join(tmp, "manifest.json")
        with open(path, "w") as fh:
            json.dump(manifest, fh)
        report = run_manifest(load_manifest(path))
        ratios = {m: round(r["ratio"], 3) for m, r in report["methods"].items()}
        print(f"synthetic classes, preprocessing={steps or 'none'}: {ratios}")

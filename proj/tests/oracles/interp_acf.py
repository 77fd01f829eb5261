"""Shape-preserving interpolation (scipy PCHIP) and sample ACF (statsmodels)
on fixed inputs. Writes tests/golden/interp_acf.json."""
import json
import pathlib

import numpy as np
from scipy.interpolate import PchipInterpolator
from statsmodels.tsa.stattools import acf

out = {}
ref_t = [0.0, 3600.0, 14400.0, 28740.0]
ref_g = [92.0, 131.0, 104.0, 97.5]
grid = np.linspace(0.0, 28740.0, 25)
out["pchip"] = {"ref_t": ref_t, "ref_g": ref_g, "grid": grid.tolist(),
                "values": PchipInterpolator(ref_t, ref_g)(grid).tolist()}
ref_t2 = [0.0, 10.0, 15.0, 40.0, 41.0]
ref_g2 = [1.0, 1.0, 3.0, 2.0, 7.0]
grid2 = np.linspace(0.0, 41.0, 42)
out["pchip_flat"] = {"ref_t": ref_t2, "ref_g": ref_g2, "grid": grid2.tolist(),
                     "values": PchipInterpolator(ref_t2, ref_g2)(grid2).tolist()}

x = [((i * 7919) % 101) / 10.0 + 0.3 * (i % 5) for i in range(64)]
out["acf"] = {"x": x, "r": acf(np.array(x), nlags=8, adjusted=False, fft=False).tolist()}

path = pathlib.Path(__file__).resolve().parents[1] / "golden" / "interp_acf.json"
path.write_text(json.dumps(out, indent=2) + "\n")
print(json.dumps({k: v.get("values", v.get("r"))[:5] for k, v in out.items()}, indent=2))

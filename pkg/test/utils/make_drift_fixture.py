import sys
import os
from pathlib import Path

# Add project root to Python path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

import numpy as np

from models import JointSequence
from services.metrics.metrics import JointSeq

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# Four joints, rigid, walking 1 cm per frame along +z
SHAPE = np.array([
    [0.0, 0.9, 0.0],
    [0.2, 0.9, 0.0],
    [0.0, 1.4, 0.05],
    [0.1, 0.5, 0.1],
])
FRAMES = 200
STEP = 0.01
# Prediction drifts along z in the second 100-frame segment, 0 to 5 cm
DRIFT = 0.05


def make_sequences():
    k = np.arange(FRAMES)
    gt = SHAPE[None] + (STEP * k)[:, None, None] * np.array([0.0, 0.0, 1.0])
    offset = np.where(k >= 100, DRIFT * (k - 100) / 99.0, 0.0)
    pred = gt + offset[:, None, None] * np.array([0.0, 0.0, 1.0])
    return JointSeq(gt), JointSeq(pred)


def write_fixtures():
    """Regenerate drift_gt.json / drift_pred.json.

    Expected values (drift_expected.json) are derived by hand:
      wa_mpjpe_100 = (0 + 1250/99) / 2 mm       (segment-wide rigid fit removes the mean drift)
      w_mpjpe_100  = (0 + 25) / 2 mm            (first frame of the segment has no drift)
      erve         = 99 * (50/99) / 199 mm/frame
      rte          = mean o_k / 1.99 m * 100 = 1.25 / 1.99  (anchored at frame 0, no yaw)
    """
    gt, pred = make_sequences()
    for name, seq in (("drift_gt.json", gt), ("drift_pred.json", pred)):
        path = FIXTURES / name
        path.write_text(JointSequence.from_domain(seq).model_dump_json() + "\n")
        print(f"Wrote {path}")


if __name__ == "__main__":
    write_fixtures()

"""Tour the review service over a live local server.

Starts the HTTP service in a background thread on a spare port, then walks
the endpoints a reviewer's browser would hit: peak list, energy histogram,
brush-to-select, anomaly map, spectrum fetch, and a status write that lands
in the label journal. Uses only the standard library as the client.
"""

import json
import os
import tempfile
import threading
import time
import urllib.request

import uvicorn

from xrf_anomaly import (
    DiffractionInjection,
    LabelStore,
    SynthConfig,
    create_app,
    detect,
    generate,
)

PORT = 8411

config = SynthConfig(
    seed=6, n_locations=9, background=100.0, peak_sigma=8.0, name="tour",
    diffraction=[
        DiffractionInjection(1, 800, 120.0, "A"),
        DiffractionInjection(4, 1850, 120.0, "B"),
        DiffractionInjection(7, 3200, 120.0, "A"),
    ],
)
ds, _ = generate(config)
report = detect(ds)
store = LabelStore(os.path.join(tempfile.mkdtemp(prefix="xrf-demo-"), "labels.jsonl"),
                   known_keys={("tour", p.location_id, p.center_channel) for p in report.peaks})
app = create_app(ds, report, store)

server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=PORT, log_level="error"))
threading.Thread(target=server.run, daemon=True).start()
base = f"http://127.0.0.1:{PORT}"
for _ in range(100):
    try:
        urllib.request.urlopen(base + "/", timeout=0.2)
        break
    except OSError:
        time.sleep(0.05)


def get(path):
    with urllib.request.urlopen(base + path, timeout=5) as resp:
        return json.loads(resp.read())


def post(path, body):
    req = urllib.request.Request(base + path, data=json.dumps(body).encode(),
                                 headers={"content-type": "application/json"})
    with urllib.request.urlopen(req, timeout=5) as resp:
        return json.loads(resp.read())


info = get("/")
print(f"service over dataset {info['dataset']!r}: "
      f"{info['locations']} locations, {info['peaks']} candidates")

peaks = get("/peaks?sort=t_abs&order=desc&class=Diffraction&limit=3")
print(f"top diffraction candidates of {peaks['total']}:")
for p in peaks["peaks"]:
    print(f"  {p['key']:>8}  {p['energy_kev']:7.3f} keV  t={p['t_abs']:6.2f}")

hist = get("/histogram?bin_width_kev=0.5")
print("energy histogram (0.5 keV bins): "
      + ", ".join(f"[{b['lower_kev']:.1f},{b['upper_kev']:.1f}):{b['count']}" for b in hist["bins"]))

# Brush the band around the second injected peak and ask which map cells
# light up; the answer is location ids, ready for highlighting.
lo, hi = 14.0, 15.0
selected = post("/select", {"ranges": [[lo, hi]]})
print(f"brushing [{lo}, {hi}] keV selects locations {selected['location_ids']}")

cells = get("/map?mode=diffraction")["cells"]
lit = [c["location_id"] for c in cells if c["density"] > 0]
print(f"diffraction map: {len(cells)} cells, lit: {lit}")

# A reviewer rejects one candidate; the write is journaled and the map dims.
key = peaks["peaks"][0]["key"]
post(f"/peaks/{key}/status", {"status": "FalsePositive", "labeler": "tour"})
cells = get("/map?mode=diffraction")["cells"]
lit_after = [c["location_id"] for c in cells if c["density"] > 0]
print(f"after rejecting {key}: lit cells {lit_after}")
print(f"journal now holds {len(store.records())} record(s)")

spec = get(f"/spectrum/{key.split(':')[0]}?peak={key}")
w = spec["window"]
print(f"spectrum fetch: {len(spec['a'])} channels, shaded window "
      f"[{w['lo_channel']}, {w['hi_channel']}] around channel {w['center_channel']}")

server.should_exit = True

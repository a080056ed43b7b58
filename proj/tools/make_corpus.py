#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under corpus/.

corpus/demo     20 made-up SDKs with policies and recorded entailment scores
corpus/tuning   five labeled policies for threshold tuning
corpus/metrics  predicted vs. ground-truth claims with a known confusion matrix

Everything is deterministic; rerunning leaves the tree unchanged.
"""

import hashlib
import json
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
LEXICON = {e["type"]: e for e in json.loads((ROOT / "data/lexicon.json").read_text())["entries"]}

CTX = "Landroid/content/Context;"
STR = "Ljava/lang/String;"

# data type -> an API whose call reads it
SOURCES = {
    "imei": "android.telephony.TelephonyManager.getDeviceId()" + STR,
    "imsi": "android.telephony.TelephonyManager.getSubscriberId()" + STR,
    "iccid": "android.telephony.TelephonyManager.getSimSerialNumber()" + STR,
    "carrier_info": "android.telephony.TelephonyManager.getNetworkOperatorName()" + STR,
    "network_info": "android.telephony.TelephonyManager.getNetworkType()I",
    "telephone_number": "android.telephony.TelephonyManager.getLine1Number()" + STR,
    "serial": "android.os.Build.getSerial()" + STR,
    "wifi_mac": "android.net.wifi.WifiInfo.getMacAddress()" + STR,
    "ip_address": "android.net.wifi.WifiInfo.getIpAddress()I",
    "ssid_bssid": "android.net.wifi.WifiInfo.getSSID()" + STR,
    "bluetooth_mac": "android.bluetooth.BluetoothAdapter.getAddress()" + STR,
    "location": "android.location.LocationManager.getLastKnownLocation(" + STR + ")Landroid/location/Location;",
    "app_list": "android.content.pm.PackageManager.getInstalledPackages(I)Ljava/util/List;",
    "google_ad_id": "com.google.android.gms.ads.identifier.AdvertisingIdClient$Info.getId()" + STR,
    "oaid": "com.bun.miitmdid.supplier.IdSupplier.getOAID()" + STR,
    "misc_sensors": "android.hardware.SensorManager.getSensorList(I)Ljava/util/List;",
    "account_info": "android.accounts.AccountManager.getAccounts()[Landroid/accounts/Account;",
    "clipboard_data": "android.content.ClipboardManager.getPrimaryClip()Landroid/content/ClipData;",
    "contact_list": "android.provider.ContactsContract$Contacts.lookupContact(Landroid/content/ContentResolver;Landroid/net/Uri;)Landroid/net/Uri;",
    "calendar": "android.provider.CalendarContract$Instances.query(Landroid/content/ContentResolver;[Ljava/lang/String;JJ)Landroid/database/Cursor;",
}

SINKS = [
    "java.net.URL.<init>(" + STR + ")V",
    "org.apache.http.client.methods.HttpPost.<init>(" + STR + ")V",
    "java.net.URLConnection.setRequestProperty(" + STR + STR + ")V",
    "org.apache.http.client.methods.HttpGet.addHeader(" + STR + STR + ")V",
]
APPEND = "java.lang.StringBuilder.append(" + STR + ")Ljava/lang/StringBuilder;"

# sdk id, version, provider, category, package, shared types, sink count,
# read-only types, claimed types (None: no policy)
SDKS = [
    ("adnet_core", "4.2.0", "Adnet", "advertising", "com.adnet.core",
     ["imei", "google_ad_id", "oaid", "app_list"], 4, ["location"],
     ["imei", "google_ad_id", "oaid", "app_list", "location"]),
    ("adnet_mediation", "2.0.1", "Adnet", "advertising", "com.adnet.mediation",
     ["google_ad_id", "ip_address"], 2, [], ["google_ad_id", "ip_address", "location"]),
    ("beacon_analytics", "1.9.3", "Beacon Labs", "analytics", "io.beacon.analytics",
     ["carrier_info", "network_info", "serial"], 2, [],
     ["carrier_info", "network_info", "device_identifiers"]),
    ("crashwatch", "5.0.0", "Crashwatch", "crash reporting", "dev.crashwatch",
     ["serial", "carrier_info"], 1, ["misc_sensors"], ["device_identifiers"]),
    ("geofence_kit", "3.3.2", "Geofence", "location", "com.geofence.kit",
     ["location", "ssid_bssid", "wifi_mac"], 4, [], ["location", "ip_address"]),
    ("shopping_ads", "7.1.0", "Shopzy", "advertising", "com.shopzy.ads",
     ["app_list", "clipboard_data", "google_ad_id"], 3, ["account_info"], None),
    ("social_share", "2.5.4", "Socially", "social", "com.socially.share",
     ["account_info", "contact_list"], 3, [], ["account_info", "contact_list", "calendar"]),
    ("pay_bridge", "1.2.0", "Paybridge", "payment", "com.paybridge.sdk",
     ["telephone_number", "imsi", "iccid"], 4, [], ["telephone_number", "imsi"]),
    ("map_tiles", "6.0.2", "Mapper", "location", "com.mapper.tiles",
     ["location", "ip_address"], 2, ["bluetooth_mac"], ["location"]),
    ("push_relay", "2.2.2", "Relay", "push", "net.relay.push",
     ["imei", "oaid"], 2, [], None),
    ("game_services", "8.4.1", "Gamehub", "game", "com.gamehub.services",
     ["google_ad_id", "misc_sensors", "network_info"], 2, [], None),
    ("voice_assist", "0.9.8", "Voicely", "utility", "ai.voicely.assist",
     ["calendar", "contact_list"], 1, [], None),
    ("metrics_lite", "1.0.4", "Lite", "analytics", "io.lite.metrics",
     ["app_list", "imei", "wifi_mac", "bluetooth_mac"], 4, ["ssid_bssid"], None),
    ("kyc_scan", "3.0.0", "Kyc", "payment", "com.kyc.scan",
     ["imei", "serial", "telephone_number"], 1, [], ["device_identifiers", "telephone_number"]),
    ("trip_sense", "4.4.0", "Tripsense", "location", "com.tripsense",
     ["location", "misc_sensors"], 3, [], ["location", "misc_sensors"]),
    ("idle_policy_only", "1.0.0", "Quiet", "utility", "com.quiet.idle", [], 0, [],
     ["imei", "location"]),
]

FIXTURE_SDKS = [
    # copied from tests/fixtures; provider, category, claims
    ("mipush_ssid.jsonl", "mipush", "3.7.0", "Xiaomi", "push", ["network_info"]),
    ("alicloud_push.jsonl", "alicloud_push", "3.1.4", "Alibaba", "push", ["android_id"]),
    ("baidu_lbs.jsonl", "baidu_lbs", "9.1.8", "Baidu", "location", ["location"]),
    ("mipush_netutil.jsonl", "mipush_netutil", "3.7.0", "Xiaomi", "push", None),
]

NOISE = [
    "This policy explains how we handle information.",
    "Contact us at privacy@example.com with any questions.",
    "We update this policy from time to time.",
]
GDPR = "According to GDPR, all collection of device identifiers must be declared in advance."


def sha(text):
    return hashlib.sha256(text.encode()).hexdigest()


def hypotheses(data_type, verb=None, term=None):
    e = LEXICON[data_type]
    verb = verb or e["verbs"][0]
    term = term or e["terms"][0]
    return (f"It will {verb} {term}.", f"It does not {verb} {term}.",
            f"It does not mention whether to {verb} {term}.")


def triple_records(premise, data_type, p, n, i, verb=None, term=None):
    out = []
    for text, score in zip(hypotheses(data_type, verb, term), (p, n, i)):
        out.append({"premise_sha256": sha(premise), "hypothesis_sha256": sha(text),
                    "entail": score, "contradict": round((1 - score) / 2, 6),
                    "neutral": round((1 - score) / 2, 6)})
    return out


def format_records(records):
    """Same canonical form the C++ formatter writes."""
    seen = {}
    for r in records:
        key = (r["premise_sha256"], r["hypothesis_sha256"])
        if key in seen and seen[key] != r:
            raise SystemExit(f"conflicting scores for {key}")
        seen[key] = r
    lines = []
    for key in sorted(seen):
        r = seen[key]
        lines.append('{"premise_sha256":"%s","hypothesis_sha256":"%s","entail":%.6f,'
                     '"contradict":%.6f,"neutral":%.6f}' % (
                         r["premise_sha256"], r["hypothesis_sha256"], r["entail"],
                         r["contradict"], r["neutral"]))
    return "\n".join(lines) + "\n"


def dump(obj):
    return json.dumps(obj, separators=(",", ":"))


def program(sdk_id, version, pkg, shared, sinks, read_only):
    lines = [dump({"schema_version": 1, "sdk_id": sdk_id, "version": version, "packages": [pkg]}),
             "# Synthetic SDK for the demo corpus."]
    collect = f"{pkg}.Collector.collect({CTX}){STR}"
    shared = [t for t in shared if t in SOURCES]
    if shared:
        lines.append(dump({"method": collect, "params": ["ctx"]}))
        names = []
        for k, t in enumerate(shared):
            lines.append(dump({"op": "call", "dst": f"v{k}", "callee": SOURCES[t], "args": ["ctx"]}))
            names.append(f"v{k}")
        lines.append(dump({"op": "call", "dst": "payload", "callee": APPEND, "args": names}))
        lines.append(dump({"op": "return", "args": ["payload"]}))
        lines.append(dump({"method": f"{pkg}.Uploader.upload({CTX})V", "params": ["ctx"], "entry": True}))
        lines.append(dump({"op": "call", "dst": "p", "callee": collect, "args": ["ctx"]}))
        for s in SINKS[:sinks]:
            lines.append(dump({"op": "call", "callee": s, "args": ["p"]}))
        lines.append(dump({"op": "return"}))
    if read_only:
        lines.append(dump({"method": f"{pkg}.Probe.probe({CTX})V", "params": ["ctx"], "entry": True}))
        for k, t in enumerate(read_only):
            lines.append(dump({"op": "call", "dst": f"r{k}", "callee": SOURCES[t], "args": ["ctx"]}))
        lines.append(dump({"op": "return"}))
    return "\n".join(lines) + "\n"


def claim_sentence(data_type):
    e = LEXICON[data_type]
    return f"We may {e['verbs'][0]} your {e['terms'][0]} to provide the service."


def policy(sdk_id, claims, records):
    sentences = [NOISE[len(sdk_id) % len(NOISE)]]
    for t in claims:
        s = claim_sentence(t)
        sentences.append(s)
        records += triple_records(s, t, 0.91, 0.04, 0.05)
    # A denial and the GDPR boilerplate; neither may yield a claim.
    denial = "We do not sell your contacts to anyone."
    sentences.append(denial)
    records += triple_records(denial, "contact_list", 0.22, 0.88, 0.09)
    if len(sdk_id) % 2 == 0:
        sentences.append(GDPR)
        records += triple_records(GDPR, "device_identifiers", 0.80, 0.05, 0.93)
    sentences.append(NOISE[(len(sdk_id) + 1) % len(NOISE)])
    return "\n".join(sentences) + "\n"


def make_demo(out):
    (out / "programs").mkdir(parents=True)
    (out / "policies").mkdir()
    records, entries = [], []
    for name, sdk_id, version, provider, category, claims in FIXTURE_SDKS:
        shutil.copy(ROOT / "tests/fixtures" / name, out / "programs" / name)
        entry = {"sdk_id": sdk_id, "version": version, "program": f"programs/{name}",
                 "metadata": {"provider": provider, "category": category}}
        if claims is not None:
            (out / "policies" / f"{sdk_id}.txt").write_text(policy(sdk_id, claims, records))
            entry["policy"] = f"policies/{sdk_id}.txt"
        entries.append(entry)
    for sdk_id, version, provider, category, pkg, shared, sinks, read_only, claims in SDKS:
        (out / "programs" / f"{sdk_id}.jsonl").write_text(
            program(sdk_id, version, pkg, shared, sinks, read_only))
        entry = {"sdk_id": sdk_id, "version": version, "program": f"programs/{sdk_id}.jsonl",
                 "metadata": {"provider": provider, "category": category}}
        if claims is not None:
            (out / "policies" / f"{sdk_id}.txt").write_text(policy(sdk_id, claims, records))
            entry["policy"] = f"policies/{sdk_id}.txt"
        entries.append(entry)
    entries.sort(key=lambda e: e["sdk_id"])
    manifest = {"schema_version": 1, "entries": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (out / "scores.jsonl").write_text(format_records(records))


# policy id, [(sentence, type, p, n, i, true?)]
TUNING = [
    ("google_policy_a", [
        ("We collect your location to show nearby results.", "location", 0.74, 0.10, 0.08, True),
        ("Some features read installed applications.", "app_list", 0.73, 0.20, 0.30, False),
    ]),
    ("google_policy_b", [
        ("We collect the advertising ID for measurement.", "google_ad_id", 0.91, 0.03, 0.05, True),
        ("Nearby sharing may use Bluetooth.", "bluetooth", 0.68, 0.10, 0.40, False),
    ]),
    ("google_policy_c", [
        ("We collect the IMEI of your device.", "imei", 0.86, 0.05, 0.07, True),
        ("You can import contacts into the app.", "contact_list", 0.62, 0.30, 0.35, False),
    ]),
    ("google_policy_d", [
        ("We collect the Android ID.", "android_id", 0.95, 0.02, 0.03, True),
        ("Your calendar stays on your device.", "calendar", 0.55, 0.40, 0.20, False),
        (GDPR, "device_identifiers", 0.90, 0.05, 0.96, False),
        ("We do not collect your call log.", "contact_log", 0.80, 0.94, 0.10, False),
    ]),
    ("google_policy_e", [
        ("We collect your IP address when you connect.", "ip_address", 0.78, 0.06, 0.10, True),
        ("We also collect your GPS location.", "location", 0.81, 0.05, 0.08, True),
    ]),
]


def make_tuning(out):
    (out / "policies").mkdir(parents=True)
    records, policies = [], []
    for pid, sentences in TUNING:
        text = "\n".join(s[0] for s in sentences) + "\n"
        (out / "policies" / f"{pid}.txt").write_text(text)
        truth = sorted({t for _, t, _, _, _, ok in sentences if ok})
        policies.append({"sdk_id": pid, "policy": f"policies/{pid}.txt", "truth": truth})
        for s, t, p, n, i, _ in sentences:
            records += triple_records(s, t, p, n, i)
    doc = {"schema_version": 1, "policies": policies}
    (out / "labeled.json").write_text(json.dumps(doc, indent=2) + "\n")
    (out / "scores.jsonl").write_text(format_records(records))


def make_metrics(out, tp=187, fp=27, fn=17, sdks=40):
    out.mkdir(parents=True)
    types = sorted(json.loads((ROOT / "data/lexicon.json").read_text())["entries"][k]["type"]
                   for k in range(41))
    pred = {f"synthetic_{k:02d}": set() for k in range(sdks)}
    truth = {f"synthetic_{k:02d}": set() for k in range(sdks)}
    used = {k: 0 for k in pred}
    kinds = ["tp"] * tp + ["fp"] * fp + ["fn"] * fn
    for n, kind in enumerate(kinds):
        sdk = f"synthetic_{n % sdks:02d}"
        t = types[(used[sdk] * 7 + n) % len(types)]
        while t in pred[sdk] or t in truth[sdk]:
            t = types[(types.index(t) + 1) % len(types)]
        used[sdk] += 1
        if kind in ("tp", "fp"):
            pred[sdk].add(t)
        if kind in ("tp", "fn"):
            truth[sdk].add(t)
    for name, table in (("predicted.json", pred), ("truth.json", truth)):
        (out / name).write_text(json.dumps({k: sorted(v) for k, v in table.items()}, indent=2) + "\n")


def main():
    corpus = ROOT / "corpus"
    shutil.rmtree(corpus, ignore_errors=True)
    make_demo(corpus / "demo")
    make_tuning(corpus / "tuning")
    make_metrics(corpus / "metrics")


if __name__ == "__main__":
    main()

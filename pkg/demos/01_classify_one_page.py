"""
Classify one page against the shipped taxonomies
================================================

Loads the four bundled taxonomies, cleans a raw HTML page down to its
text, and scores it with the offline lexical backend. No network, no
models: this is the fastest way to see the label pipeline end to end.
"""

from tfa_audit.classify import ClassificationConfig, builtin_lexical_backend, classify_primary
from tfa_audit.extract import clean_page
from tfa_audit.taxonomy import load_all_shipped

HTML = b"""
<!DOCTYPE html>
<html>
<head><title>Device safety</title><style>body { color: #222; }</style></head>
<body>
<nav><a href="/">Home</a> <a href="/help">Help</a></nav>
<main>
  <h1>Worried someone is tracking your phone?</h1>
  <p>Monitoring software can report your location, read your messages and
  switch on the microphone without any visible sign. Location tracking of a
  partner without consent is a form of coercive control, and it often comes
  together with harassment over calls and messages.</p>
  <p>A support worker can run a spyware scan with you and help you install a
  safety app. Free counselling is available every day; do not delete anything
  before getting advice if you want to keep evidence of the tracking or the
  threats you have received.</p>
</main>
<footer>All rights reserved.</footer>
</body>
</html>
"""

# 1. Boilerplate removal: scripts, styles, nav and footer disappear.
page = clean_page("https://example.org.au/device-safety", HTML)
print(f"extracted {page.word_count} words")
print(page.text[:120], "...")
print()

# 2. Score the cleaned text against each taxonomy's six primary categories.
backend = builtin_lexical_backend()
cfg = ClassificationConfig(threshold=0.25)  # lexical scores are sparse; lower bar
for name, taxonomy in load_all_shipped().items():
    [assignment] = classify_primary([(page.url, page.text)], taxonomy, backend, cfg)
    labels = ", ".join(
        f"{taxonomy.primary(pid).label} ({score:.2f})" for pid, score in assignment.primaries
    ) or "(none)"
    print(f"{name:<11} {assignment.status:<10} {labels}")

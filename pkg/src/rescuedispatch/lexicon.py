"""Bundled word lists backing the text features.

These are intentionally small, dependency-free approximations: a sentiment
lexicon with scores in [-1, 1], emotion word sets, a noun list plus suffix
heuristics, and an English stop-word list. Exact values are contractual only
for determinism and bounds, not for agreement with any external toolkit.
"""

STOP_WORDS = frozenset("""
a about above after again all am an and any are as at be because been before
being below between both but by did do does doing down during each few for
from further had has have having he her here hers him his how i if in into is
it its itself just me more most my myself no nor not now of off on once only
or other our ours out over own same she so some such than that the their
theirs them then there these they this those through to too under until up
very was we were what when where which while who whom why will with you your
yours
""".split())

# word -> score in [-1, 1]
SENTIMENT_SCORES = {
    "safe": 0.8, "saved": 0.9, "rescued": 0.9, "alive": 0.7, "okay": 0.5,
    "ok": 0.4, "fine": 0.4, "good": 0.6, "great": 0.8, "thanks": 0.6,
    "thank": 0.6, "hope": 0.4, "helped": 0.5, "relief": 0.5, "shelter": 0.2,
    "love": 0.7, "amazing": 0.8, "hero": 0.8, "heroes": 0.8, "dry": 0.3,
    "recovered": 0.6, "calm": 0.4, "secure": 0.5, "blessed": 0.6,
    "help": -0.4, "emergency": -0.7, "danger": -0.8, "dangerous": -0.8,
    "trapped": -0.9, "stranded": -0.8, "stuck": -0.6, "flood": -0.6,
    "flooded": -0.7, "flooding": -0.7, "drowning": -1.0, "dying": -1.0,
    "dead": -1.0, "death": -1.0, "hurt": -0.7, "injured": -0.8, "sick": -0.6,
    "scared": -0.7, "afraid": -0.6, "terrified": -0.9, "panic": -0.8,
    "desperate": -0.8, "crying": -0.7, "lost": -0.6, "missing": -0.7,
    "destroyed": -0.8, "damage": -0.6, "damaged": -0.6, "collapsed": -0.8,
    "rising": -0.5, "storm": -0.5, "hurricane": -0.6, "evacuate": -0.5,
    "urgent": -0.7, "critical": -0.8, "severe": -0.7, "worse": -0.6,
    "bad": -0.5, "terrible": -0.8, "horrible": -0.8, "awful": -0.7,
    "starving": -0.8, "hungry": -0.5, "thirsty": -0.5, "cold": -0.4,
    "sinking": -0.8, "broken": -0.6, "bleeding": -0.8, "pain": -0.7,
}

SAD_WORDS = frozenset("""
sad crying cry tears heartbroken grief mourning lost missing lonely alone
devastated hopeless miserable depressed despair sorrow worried anxious
scared afraid terrified
""".split())

ANGRY_WORDS = frozenset("""
angry mad furious outraged rage hate ignored abandoned useless unacceptable
slow failing blame disgusted frustrated fed
""".split())

NOUN_WORDS = frozenset("""
water food house home roof street road bridge car boat truck baby child
children kids family mother father grandma grandpa woman women man men people
person victim victims dog cat pet pets rescue help shelter hospital doctor
medicine supplies power phone battery storm hurricane flood rain wind damage
area neighborhood city town county school church building apartment floor
attic basement door window tree levee river bayou creek street address
location mile miles team unit crew boatload rope ladder blanket clothes
insulin oxygen wheelchair ambulance police firefighter
""".split())

NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ship", "hood", "age",
                 "ance", "ence", "ery", "ity")

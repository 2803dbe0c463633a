"""Regenerates the malformed-response corpus used by the repair tests.

Each file is one synthetic LLM response exhibiting one or more of the
pathologies seen in harvested answers: TSV-flattened newlines, comments
that swallow statements, markdown fences and chatter, undeclared
well-known prefixes, missing final terminators, duplicated prefix lines.
"""

PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}

NOUNS = {
    "Air": [("hasHumidity", "Humidity"), ("hasHumidity", "xsd:float"), ("hasTemperature", "xsd:decimal"),
            ("containsGas", "Gas")],
    "Chair": [("hasLeg", "Leg"), ("hasSeat", "Seat"), ("numberOfLegs", "xsd:integer")],
    "Water": [("hasState", "State"), ("hasTemperature", "xsd:decimal"), ("hasSource", "Source")],
    "Book": [("hasAuthor", "Author"), ("hasTitle", "xsd:string"), ("hasPageCount", "xsd:integer")],
    "Car": [("hasEngine", "Engine"), ("hasColor", "xsd:string"), ("hasWheel", "Wheel")],
    "City": [("locatedIn", "Country"), ("hasPopulation", "xsd:integer"), ("hasMayor", "Person")],
    "Family": [("hasMember", "Person"), ("hasSurname", "xsd:string")],
    "Money": [("hasCurrency", "Currency"), ("hasAmount", "xsd:decimal")],
}


def ontology(noun, declare=("rdf", "rdfs", "owl", "xsd"), comments=True):
    p = noun.lower()
    lines = [f"@prefix {p}: <http://example.org/{p}#> ."]
    lines += [f"@prefix {k}: <{PREFIXES[k]}> ." for k in declare]
    lines.append("")
    if comments:
        lines.append("# Classes")
    classes = [noun] + sorted({r for _, r in NOUNS[noun] if ":" not in r})
    for c in classes:
        lines.append(f"{p}:{c} rdf:type owl:Class .")
    lines.append("")
    if comments:
        lines.append("# Properties")
    for prop, rng in NOUNS[noun]:
        r = rng if ":" in rng else f"{p}:{rng}"
        lines.append(f"{p}:{prop} rdf:type rdf:Property ;")
        lines.append(f"    rdfs:domain {p}:{noun} ;")
        lines.append(f"    rdfs:range {r} .")
    return "\n".join(lines) + "\n"


def fenced(body, lang="turtle"):
    return f"Here is an ontology in Turtle format:\n\n```{lang}\n{body}```\n\nThis ontology defines the main classes and properties.\n"


def flatten(text):
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def swallow(body):
    # The comment and the statements after it share one physical line.
    out = body.replace("# Classes\n", "# Classes ")
    return out.replace("# Properties\n", "# Properties ")


def drop_terminator(body):
    body = body.rstrip()
    assert body.endswith(" .")
    return body[:-2] + "\n"


docs = {}
n = 0


def add(kind, text):
    global n
    n += 1
    docs[f"{n:02d}_{kind}.txt"] = text


nouns = list(NOUNS)
for noun in nouns:
    add("escaped_newlines", flatten(fenced(ontology(noun))))
for noun in nouns:
    add("comment_swallow", swallow(ontology(noun)))
for noun in nouns:
    add("fenced_prose", fenced(ontology(noun), lang="ttl" if noun < "D" else "turtle"))
for noun in nouns:
    add("missing_prefixes", ontology(noun, declare=("rdf",)))
for noun in nouns:
    add("missing_terminator", drop_terminator(ontology(noun)))
for noun in nouns[:4]:
    body = ontology(noun)
    head, rest = body.split("\n", 1)
    add("duplicate_prefix", head + "\n" + head + "\n" + rest)
for noun in nouns[4:]:
    add("escaped_swallow_missing", flatten(fenced(swallow(ontology(noun, declare=("rdf", "owl"))))))
for noun in nouns[:3]:
    add("prose_unfenced", "Sure! Below is a basic ontology.\n\n" + drop_terminator(ontology(noun, declare=("rdf", "rdfs")))
        + "\nLet me know if you need anything else.\n")
for noun in nouns[:4]:
    add("single_line", " ".join(l.strip() for l in ontology(noun).splitlines() if l.strip()) + "\n")
add("no_rdf", "I'm sorry, but I can't produce an ontology for that request.")
add("no_rdf_list", "An ontology for Air could include:\n1. Humidity\n2. Temperature\n3. Pressure\n")

for name, text in docs.items():
    with open(name, "w", encoding="utf-8") as f:
        f.write(text)
print(len(docs), "documents")

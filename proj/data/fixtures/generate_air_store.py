#!/usr/bin/env python3
# Copyright 2026 The modl-forge Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes air_store.tsv: a synthetic 80-response store for the noun Air."""

import pathlib

HERE = pathlib.Path(__file__).resolve().parent
DATA = HERE.parent
INSTRUCTION = "Provide it in valid Turtle/RDF format, excluding any extra text."

RESPONSES = [
    # fenced, with an individual
    "Here is a small ontology for Air:\n\n```turtle\n"
    "@prefix ex: <http://example.org/air#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
    "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n\n"
    "ex:Air a owl:Class .\n"
    "ex:Humidity a owl:Class .\n"
    "ex:hasHumidity a owl:ObjectProperty ;\n    rdfs:domain ex:Air ;\n    rdfs:range ex:Humidity .\n"
    "ex:hasTemperature a owl:DatatypeProperty ;\n    rdfs:domain ex:Air ;\n    rdfs:range xsd:float .\n"
    "ex:air1 a ex:Air ;\n    ex:hasTemperature \"21.5\"^^xsd:float .\n"
    "```\n\nThe ontology models air and its humidity.",
    # bare Turtle, other namespace and naming style
    "@prefix myont: <http://www.myontology.com/air/> .\n"
    "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n\n"
    "myont:air a rdfs:Class .\n"
    "myont:has_humidity a rdf:Property ;\n    rdfs:domain myont:air ;\n    rdfs:range xsd:float .\n"
    "myont:has_pressure a rdf:Property ;\n    rdfs:domain myont:air ;\n    rdfs:range xsd:decimal .\n",
    # prose around prefix-anchored Turtle, subclass hierarchy
    "Sure! Below is an ontology.\n"
    "@prefix : <http://example.com/ontology#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    ":Air a rdfs:Class .\n"
    ":Gas a rdfs:Class .\n"
    ":Oxygen rdfs:subClassOf :Gas .\n"
    ":Nitrogen rdfs:subClassOf :Gas .\n"
    ":composedOf rdfs:domain :Air ;\n    rdfs:range :Gas .\n"
    ":hasHumidity rdfs:domain :Air ;\n    rdfs:range :Humidity .\n"
    "I hope this helps.",
    # comment-swallowed statement
    "@prefix ex: <http://example.org/ont#> .\n"
    "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\n"
    "ex:Air a rdfs:Class .\n"
    "# Properties ex:hasQuality a rdf:Property ;\n"
    "    rdfs:domain ex:Air ;\n    rdfs:range ex:AirQuality .\n"
    "ex:hasHumidity a rdf:Property ;\n    rdfs:domain ex:Air ;\n    rdfs:range ex:Humidity .\n",
    # undeclared prefixes
    "ex:Air a owl:Class .\n"
    "ex:Pollutant a owl:Class .\n"
    "ex:containsPollutant a owl:ObjectProperty ;\n    rdfs:domain ex:Air ;\n    rdfs:range ex:Pollutant .\n"
    "ex:hasHumidity a owl:DatatypeProperty ;\n    rdfs:range xsd:float .\n",
    # no RDF at all
    "Air is the invisible mixture of gases that surrounds the Earth. It consists mostly of "
    "nitrogen and oxygen, with small amounts of argon, carbon dioxide and water vapour. "
    "Its humidity, temperature and pressure vary with altitude and weather.",
    # missing final terminator, schema-style namespace
    "@prefix air: <https://ontology.example.net/air#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
    "air:Air a rdfs:Class .\n"
    "air:Humidity a rdfs:Class .\n"
    "air:hasHumidity rdfs:domain air:Air ;\n    rdfs:range air:Humidity .\n"
    "air:hasTemperature rdfs:domain air:Air ;\n    rdfs:range xsd:float",
    # fenced with instance data only beside the schema
    "```\n"
    "@prefix ex: <http://example.org/> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
    "ex:Air a rdfs:Class .\n"
    "ex:hasPressure rdfs:domain ex:Air ; rdfs:range xsd:decimal .\n"
    "ex:morningAir a ex:Air ; ex:hasPressure 1013.25 .\n"
    "ex:morningAir ex:observedAt ex:station7 .\n"
    "```",
]


def escape(s):
    return s.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")


def templates():
    for line in (DATA / "prompts.tsv").read_text().splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        base, variant, _, text = line.split("\t")
        yield int(base), int(variant), text


def main():
    rows = ["noun_slug\tbase_id\tvariant_id\tturtle_flag\tprompt_text\tresponse_text\tmodel_id\ttimestamp"]
    i = 0
    for base, variant, text in templates():
        prompt = text.replace("[noun]", "Air", 1)
        for flag in (0, 1):
            full = prompt + " " + INSTRUCTION if flag else prompt
            response = RESPONSES[i % len(RESPONSES)]
            stamp = "2023-10-02T%02d:%02d:00Z" % (9 + i // 60, i % 60)
            rows.append("\t".join(["air", str(base), str(variant), str(flag), escape(full),
                                   escape(response), "synthetic-fixture", stamp]))
            i += 1
    (HERE / "air_store.tsv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()

"""Fixture vocabularies for synthetic corpora.

Surnames mix plain, diacritic-bearing (mostly German) and compound forms so
that diacritic, spacing and compound-name inaccuracies have material to work
on. Journals carry their official abbreviations; the first abbreviation is
the form references normally cite.
"""

from __future__ import annotations

from dataclasses import dataclass

from citematch.model import Domain

SURNAMES = (
    "Adams", "Albrecht", "Altenmüller", "Arduengo", "Bachmann", "Baier", "Bäcker", "Bauer",
    "Baumgärtner", "Becker", "Behrens", "Bergmann", "Blümel", "Böhm", "Brandt", "Bräuninger",
    "Brenner", "Brückner", "Burkhardt", "Carter", "Clarke", "Dahl", "Dietrich", "Döring",
    "Dreher", "Eberhardt", "Ebner", "Engel", "Falk", "Fischer", "Förster", "Franke",
    "Freitag", "Fuchs", "Gärtner", "Geißler", "Giessler", "Gottschalk", "Graf", "Grün",
    "Günther", "Haas", "Hahn", "Hartmann", "Hauser", "Heinrich", "Herrmann", "Hoffmann",
    "Holland", "Hollstein", "Horn", "Huber", "Jäger", "Jansen", "Jung", "Kaiser",
    "Keller", "Kessler", "Klein", "Köhler", "König", "Köster", "Kraus", "Krüger",
    "Kuhn", "Lange", "Lehmann", "Lichtman", "Lorenz", "Ludwig", "Maier", "Marx",
    "Meißner", "Mertens", "Möller", "Morgan", "Müller", "Nagel", "Neumann", "Nowak",
    "Oberländer", "Otto", "Pant", "Peters", "Pfeiffer", "Pohl", "Quast", "Raghunathan",
    "Ramos", "Reuter", "Richter", "Ritter", "Roth", "Rößler", "Sauer", "Schäfer",
    "Scholz", "Schröder", "Schubert", "Schulze", "Seidel", "Shanmugasundaram", "Simon", "Sommer",
    "Stein", "Strauß", "Thiele", "Tröger", "Ulrich", "Vobruba", "Vogel", "Voigt",
    "Wagner", "Walter", "Weber", "Weiß", "Werner", "Winkler", "Wolff", "Wörner",
    "Yilmaz", "Zimmermann", "Zöller", "Zuckerman",
    # compound names
    "Garcia-Elias", "De Castell", "Müller-Lüdenscheidt", "Schmidt-Rohr", "Van der Berg",
    "Le Roux", "Meyer-Abich", "Ortega-Sanchez", "Lopez-Garcia", "Von Weizsäcker",
)

FIRST_NAMES = {
    "A": ("Anna", "Andreas"), "B": ("Bernd", "Birgit"), "C": ("Carla", "Christian"),
    "D": ("Daniel", "Dorothea"), "E": ("Elke", "Erik"), "F": ("Felix", "Frieda"),
    "G": ("Georg", "Gisela"), "H": ("Hans", "Hanna"), "I": ("Ingrid", "Ivo"),
    "J": ("Jonas", "Julia"), "K": ("Karl", "Katrin"), "L": ("Lena", "Lukas"),
    "M": ("Martin", "Maria"), "N": ("Nina", "Norbert"), "O": ("Olaf", "Olga"),
    "P": ("Paul", "Petra"), "Q": ("Quentin", "Quirin"), "R": ("Ruth", "Rainer"),
    "S": ("Sabine", "Stefan"), "T": ("Thomas", "Tanja"), "U": ("Ute", "Uwe"),
    "V": ("Vera", "Volker"), "W": ("Werner", "Wiebke"), "X": ("Xaver", "Xenia"),
    "Y": ("Yvonne", "Yusuf"), "Z": ("Zoe", "Zacharias"),
}

INITIAL_LETTERS = "ABCDEFGHIJKLMNOPRSTUVWZ"


@dataclass(frozen=True)
class Journal:
    full: str
    abbrevs: tuple[str, ...]
    domain: Domain
    first_year: int


_N = Domain.NATURAL_SCIENCES
_S = Domain.SOCIAL_SCIENCES_HUMANITIES

JOURNALS = (
    Journal("Heteroatom Chemistry", ("HETEROATOM CHEM",), _N, 1990),
    Journal("Hand Clinics", ("HAND CLIN",), _N, 1985),
    Journal("Current Opinion in Neurobiology", ("CURR OPIN NEUROBIOL",), _N, 1991),
    Journal("Chemie in unserer Zeit", ("CHEM UNSERER ZEIT", "CHEM Z"), _N, 1967),
    Journal("Deutsche Medizinische Wochenschrift", ("DEUT MED WOCHENSCHR", "DTSCH MED WSCHR"), _N, 1875),
    Journal("Angewandte Chemie International Edition", ("ANGEW CHEM INT EDIT",), _N, 1962),
    Journal("Journal of the American Chemical Society", ("J AM CHEM SOC",), _N, 1879),
    Journal("Physical Review Letters", ("PHYS REV LETT",), _N, 1958),
    Journal("Nature Genetics", ("NAT GENET",), _N, 1992),
    Journal("Journal of Biological Chemistry", ("J BIOL CHEM",), _N, 1905),
    Journal("Naturwissenschaften", ("NATURWISSENSCHAFTEN",), _N, 1913),
    Journal("Zeitschrift für Naturforschung", ("Z NATURFORSCH",), _N, 1946),
    Journal("Journal of Hand Surgery", ("J HAND SURG",), _N, 1976),
    Journal("Der Nervenarzt", ("NERVENARZT",), _N, 1928),
    Journal("Medizinische Klinik", ("MED KLIN",), _N, 1905),
    Journal("Geophysical Research Letters", ("GEOPHYS RES LETT",), _N, 1974),
    Journal("Tetrahedron Letters", ("TETRAHEDRON LETT",), _N, 1959),
    Journal("European Journal of Neuroscience", ("EUR J NEUROSCI",), _N, 1989),
    Journal("Annalen der Physik", ("ANN PHYS-BERLIN", "ANN PHYS"), _N, 1799),
    Journal("Berliner Journal für Soziologie", ("BERL J SOZIOL",), _S, 1991),
    Journal("Kölner Zeitschrift für Soziologie und Sozialpsychologie", ("KOLNER Z SOZIOL SOZ",), _S, 1948),
    Journal("Zeitschrift für Soziologie", ("Z SOZIOL",), _S, 1972),
    Journal("Politische Vierteljahresschrift", ("POLIT VIERTELJAHRESS",), _S, 1960),
    Journal("Zeitschrift für Pädagogik", ("Z PADAGOGIK",), _S, 1955),
    Journal("Journal of Curriculum Studies", ("J CURRICULUM STUD",), _S, 1968),
    Journal("Studies in Higher Education", ("STUD HIGH EDUC",), _S, 1976),
    Journal("Soziale Welt", ("SOZ WELT",), _S, 1949),
    Journal("Leviathan", ("LEVIATHAN",), _S, 1973),
    Journal("American Sociological Review", ("AM SOCIOL REV",), _S, 1936),
    Journal("European Sociological Review", ("EUR SOCIOL REV",), _S, 1985),
    Journal("Psychologische Rundschau", ("PSYCHOL RUNDSCH",), _S, 1949),
    Journal("Zeitschrift für Erziehungswissenschaft", ("Z ERZIEHWISS",), _S, 1998),
    Journal("Historische Zeitschrift", ("HIST Z",), _S, 1859),
    Journal("Journal of European Public Policy", ("J EUR PUBLIC POLICY",), _S, 1994),
    Journal("Research Policy", ("RES POLICY",), _S, 1972),
    Journal("Scientometrics", ("SCIENTOMETRICS",), _S, 1978),
)

TITLE_WORDS = (
    "analysis", "effects", "structure", "synthesis", "inequality", "education", "regulation",
    "mobility", "dynamics", "reform", "networks", "evidence", "compounds", "response",
    "labour", "market", "policy", "cells", "protein", "migration", "school", "theory",
    "measurement", "citation", "patterns", "stability", "reaction", "membrane", "welfare",
)

# material for fused prefixes and padding
PREFIX_CHUNKS = ("Goetz", "Bren", "Kalt", "Ober", "Stamm", "Wald", "Holz", "Grau")
PADDING_LETTERS = "ENRST"
ADDITIONAL_INFO = ("IN PRESS", "ONLINE FIRST", "UNPUB")

from importlib import resources

from foldkit.complexes import complex_from_words, parse_complex
from foldkit.words import Alphabet, parse_word


def fixture_text(name):
    return resources.files("foldkit").joinpath("fixtures", name).read_text()


def fixture_complex(name):
    return parse_complex(fixture_text(name))


def words_complex(names, *cells):
    """Complex over a rose whose cells are given as words."""
    al = Alphabet(names.split())
    return complex_from_words(len(al), [parse_word(c, al).letters for c in cells])

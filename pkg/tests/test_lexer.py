import pytest

from clonescope.errors import LexError
from clonescope.lexer import TokenKind, tokenize

from helpers import random_function


def kinds_and_lexemes(source):
    return [(tok.kind.value, tok.lexeme) for tok in tokenize(source)]


def test_minimal_statement():
    assert kinds_and_lexemes("int x;") == [
        ("keyword", "int"), ("ident", "x"), ("punct", ";"),
    ]


def test_assignment_token_count():
    tokens = tokenize("x = x + 1;")
    assert len(tokens) == 6
    assert tokens[-1].lexeme == ";"


def test_comment_elision():
    assert kinds_and_lexemes("/*c*/ a") == [("ident", "a")]
    assert kinds_and_lexemes("// line\nb") == [("ident", "b")]


def test_line_numbers_preserved_across_comments():
    tokens = tokenize("/* one\ntwo */\nint x;")
    assert tokens[0].span.start_line == 3


def test_illegal_character_raises_with_span():
    with pytest.raises(LexError) as err:
        tokenize("uint a = 1;\n  @")
    assert err.value.span.start_line == 2
    assert err.value.span.start_col == 3


def test_unterminated_block_comment():
    with pytest.raises(LexError):
        tokenize("a /* never closed")


def test_unterminated_string():
    with pytest.raises(LexError):
        tokenize('x = "oops;')


def test_multichar_operators_lex_whole():
    lexemes = [tok.lexeme for tok in tokenize("a >= b && c ** 2 != d => e")]
    assert lexemes == ["a", ">=", "b", "&&", "c", "**", "2", "!=", "d", "=>", "e"]


def test_number_forms():
    tokens = tokenize("3 3.68 0xFF")
    assert [tok.lexeme for tok in tokens] == ["3", "3.68", "0xFF"]
    assert all(tok.kind is TokenKind.NUMBER for tok in tokens)


def test_spans_are_one_based_and_inclusive():
    tokens = tokenize("ab cd")
    assert tokens[0].span.start_col == 1
    assert tokens[0].span.end_col == 2
    assert tokens[1].span.start_col == 4
    assert tokens[1].span.end_col == 5


@pytest.mark.parametrize("seed", range(25))
def test_reconstruction_round_trip(seed):
    # Lexemes plus the skipped gaps must reproduce the source exactly.
    source = random_function(seed)
    tokens = tokenize(source)
    previous_end = 0
    for tok in tokens:
        gap = source[previous_end:tok.start_offset]
        assert gap.strip() == "" or gap.lstrip().startswith(("//", "/*"))
        assert source[tok.start_offset:tok.end_offset] == tok.lexeme
        previous_end = tok.end_offset
    assert source[previous_end:].strip() == ""

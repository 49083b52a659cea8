from cmcl.corpus import normalize, tokenize


def test_normalize_masks_and_lowercases():
    assert normalize("@Raj GIRL http://x.co") == "<usr> girl <url>"


def test_normalize_empty():
    assert normalize("") == ""


def test_normalize_deletes_reserved_chars():
    assert normalize("abc#d*e") == "abcde"


def test_normalize_www_and_schemes():
    assert normalize("see WWW.example.com or https://a.b") == "see <url> or <url>"


def test_normalize_drops_tokens_made_of_reserved_chars():
    assert normalize("a ### b") == "a b"


def test_tokenize_examples():
    assert tokenize("meri girl") == ["meri", "girl"]
    assert tokenize("  a  b ") == ["a", "b"]
    assert tokenize("") == []

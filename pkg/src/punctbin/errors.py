class TreeParseError(ValueError):
    """Malformed bracketed input.

    ``offset`` is a character offset into the parsed text; ``tree_index`` is
    the 1-based position of the offending tree when reading a corpus.
    """

    def __init__(self, message, offset=None, tree_index=None, line=None):
        self.offset = offset
        self.tree_index = tree_index
        self.line = line
        self.reason = message
        where = []
        if tree_index is not None:
            where.append("tree %d" % tree_index)
        if line is not None:
            where.append("line %d" % line)
        if offset is not None:
            where.append("offset %d" % offset)
        if where:
            message = "%s (%s)" % (message, ", ".join(where))
        super().__init__(message)


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class FormatError(ValueError):
    """Malformed CoNLL or gold-cache input."""

    def __init__(self, message, line=None):
        self.line = line
        self.reason = message
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class IntegrityError(ValueError):
    """Inverse transformation met data it did not produce."""


class ModelFormatError(ValueError):
    pass

"""Parser for the small PDDL subset used by the bundled planning models.

Supported: :strips and :typing requirements, typed parameters/objects,
conjunctive positive preconditions, conjunctive effects where deletes are
written as (not (...)).  Nothing else — no ADL, numerics or temporal
constructs.  The grammar is documented in docs/pddl-subset.md.

Two modes:
- lenient (default): atoms whose predicate was never declared are
  auto-declared with the arity of their first use.  One of the bundled
  domain files declares (charge) but uses (charged) in an effect; lenient
  mode accepts that and records a warning.
- strict: undeclared predicates are an error.
"""

from dataclasses import dataclass, field


class ParseError(Exception):
    """Syntax or declaration error, carrying a 1-based line and column."""

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, col {col})")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    """A predicate applied to arguments (objects or ?variables)."""

    pred: str
    args: tuple

    def text(self):
        if self.args:
            return self.pred + " " + " ".join(self.args)
        return self.pred


@dataclass
class ActionSchema:
    name: str
    params: list  # (variable, type) pairs, variables include the leading '?'
    precondition: list  # positive Atoms
    add: list
    delete: list


@dataclass
class LiftedTask:
    """Pre-grounding form of a planning task (domain + problem)."""

    domain_name: str
    types: list
    objects: dict  # object name -> type name
    predicates: dict  # predicate name -> list of parameter types
    action_schemas: list
    init: list  # ground Atoms
    goal: list  # ground Atoms
    warnings: list = field(default_factory=list)


# ---------------------------------------------------------------- tokenizer

_TOKEN_LPAR = "("
_TOKEN_RPAR = ")"


def _tokenize(text):
    """Yield (token, line, col) triples.  ';' starts a comment to EOL."""
    tokens = []
    line = 1
    col = 0
    word = []
    word_line = word_col = 0
    i = 0
    n = len(text)

    def flush():
        if word:
            tokens.append(("".join(word), word_line, word_col))
            word.clear()

    while i < n:
        ch = text[i]
        col += 1
        if ch == "\n":
            flush()
            line += 1
            col = 0
        elif ch == ";":
            flush()
            while i < n and text[i] != "\n":
                i += 1
            continue  # newline handled on next pass
        elif ch in "()":
            flush()
            tokens.append((ch, line, col))
        elif ch.isspace():
            flush()
        else:
            if not word:
                word_line, word_col = line, col
            word.append(ch)
        i += 1
    flush()
    return tokens


class _Reader:
    """S-expression reader over the token list."""

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self):
        if self.pos >= len(self.tokens):
            return None
        return self.tokens[self.pos]

    def _next(self):
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else ("", 1, 1)
            raise ParseError("unexpected end of input", last[1], last[2])
        self.pos += 1
        return tok

    def read(self):
        """Read one s-expression: a (value, line, col) leaf or a list node.

        List nodes are ('list', items, line, col) where items are nodes.
        """
        tok, line, col = self._next()
        if tok == _TOKEN_LPAR:
            items = []
            while True:
                nxt = self._peek()
                if nxt is None:
                    raise ParseError("missing ')'", line, col)
                if nxt[0] == _TOKEN_RPAR:
                    self._next()
                    return ("list", items, line, col)
                items.append(self.read())
        if tok == _TOKEN_RPAR:
            raise ParseError("unexpected ')'", line, col)
        return ("sym", tok, line, col)

    def at_end(self):
        return self._peek() is None


def _is_list(node):
    return node[0] == "list"


def _sym(node):
    if node[0] != "sym":
        raise ParseError("expected a symbol", node[2], node[3])
    return node[1]


def _node_pos(node):
    return node[2], node[3]


# ------------------------------------------------------------------ parser


def _parse_typed_list(items, what, line, col):
    """Parse 'a b c - t1 d - t2' style lists into (name, type) pairs.

    Names without a trailing '- type' group default to type 'object'.
    """
    out = []
    pending = []
    i = 0
    while i < len(items):
        sym = _sym(items[i])
        if sym == "-":
            if i + 1 >= len(items):
                raise ParseError(f"missing type after '-' in {what}", line, col)
            tname = _sym(items[i + 1])
            if not pending:
                raise ParseError(f"'-' with no preceding names in {what}", line, col)
            for name in pending:
                out.append((name, tname))
            pending = []
            i += 2
        else:
            pending.append(sym)
            i += 1
    for name in pending:
        out.append((name, "object"))
    return out


class _TaskBuilder:
    def __init__(self, strict):
        self.strict = strict
        self.types = ["object"]
        self.predicates = {}
        self.objects = {}
        self.schemas = []
        self.warnings = []
        self.domain_name = None

    # -- declarations ------------------------------------------------

    def add_type(self, name, parent, line, col):
        if parent not in self.types and parent != "object":
            raise ParseError(f"undeclared parent type '{parent}'", line, col)
        if name not in self.types:
            self.types.append(name)

    def declare_predicate(self, name, param_types):
        self.predicates[name] = list(param_types)

    def check_atom(self, atom, line, col, bound_vars):
        """Validate one atom against declarations; auto-declare in lenient mode."""
        if atom.pred not in self.predicates:
            if self.strict:
                raise ParseError(f"undeclared predicate '{atom.pred}'", line, col)
            # infer parameter types from the arguments at first use
            inferred = []
            for a in atom.args:
                if a.startswith("?"):
                    inferred.append(bound_vars.get(a, "object"))
                else:
                    inferred.append(self.objects.get(a, "object"))
            self.declare_predicate(atom.pred, inferred)
            self.warnings.append(
                f"auto-declared predicate '{atom.pred}' with arity {len(atom.args)}"
            )
        expected = len(self.predicates[atom.pred])
        if len(atom.args) != expected:
            raise ParseError(
                f"arity mismatch for '{atom.pred}': got {len(atom.args)}, "
                f"declared {expected}",
                line,
                col,
            )
        for a in atom.args:
            if a.startswith("?"):
                if a not in bound_vars:
                    raise ParseError(f"unbound variable '{a}'", line, col)
            elif a not in self.objects:
                raise ParseError(f"undeclared object '{a}'", line, col)


GROUND = {}  # sentinel bound-vars table for init/goal contexts


def _read_atom(node):
    if not _is_list(node) or not node[1]:
        line, col = _node_pos(node)
        raise ParseError("expected an atom", line, col)
    items = node[1]
    pred = _sym(items[0])
    args = tuple(_sym(x) for x in items[1:])
    return Atom(pred, args), node[2], node[3]


def _read_condition(node, builder, bound_vars, allow_not):
    """Read (and ...) | (atom) | (and ) into (positives, negatives)."""
    line, col = _node_pos(node)
    if not _is_list(node):
        raise ParseError("expected a condition", line, col)
    items = node[1]
    if not items:
        return [], []  # bare () — empty condition
    head = items[0]
    if head[0] == "sym" and head[1] == "and":
        pos, neg = [], []
        for sub in items[1:]:
            p, n = _read_condition(sub, builder, bound_vars, allow_not)
            pos.extend(p)
            neg.extend(n)
        return pos, neg
    if head[0] == "sym" and head[1] == "not":
        if not allow_not:
            raise ParseError("negative literals are not allowed here", line, col)
        if len(items) != 2:
            raise ParseError("'not' takes exactly one atom", line, col)
        atom, aline, acol = _read_atom(items[1])
        builder.check_atom(atom, aline, acol, bound_vars)
        return [], [atom]
    atom, aline, acol = _read_atom(node)
    builder.check_atom(atom, aline, acol, bound_vars)
    return [atom], []


def _parse_domain(node, builder):
    line, col = _node_pos(node)
    items = node[1]
    if len(items) < 2 or _sym(items[0]) != "define":
        raise ParseError("expected (define (domain ...) ...)", line, col)
    head = items[1]
    if not _is_list(head) or len(head[1]) != 2 or _sym(head[1][0]) != "domain":
        raise ParseError("expected (domain NAME)", line, col)
    builder.domain_name = _sym(head[1][1])

    for section in items[2:]:
        sline, scol = _node_pos(section)
        if not _is_list(section) or not section[1]:
            raise ParseError("expected a domain section", sline, scol)
        key = _sym(section[1][0])
        body = section[1][1:]
        if key == ":requirements":
            for req in body:
                rname = _sym(req)
                if rname not in (":strips", ":typing"):
                    raise ParseError(f"unsupported requirement '{rname}'", sline, scol)
        elif key == ":types":
            for name, parent in _parse_typed_list(body, ":types", sline, scol):
                builder.add_type(name, parent, sline, scol)
        elif key == ":predicates":
            for pnode in body:
                if not _is_list(pnode) or not pnode[1]:
                    raise ParseError("bad predicate declaration", sline, scol)
                pname = _sym(pnode[1][0])
                typed = _parse_typed_list(pnode[1][1:], ":predicates", sline, scol)
                for _, tname in typed:
                    if tname not in builder.types:
                        raise ParseError(f"undeclared type '{tname}'", sline, scol)
                builder.declare_predicate(pname, [t for _, t in typed])
        elif key == ":action":
            _parse_action(body, builder, sline, scol)
        else:
            raise ParseError(f"unknown domain section '{key}'", sline, scol)


def _parse_action(body, builder, line, col):
    if not body:
        raise ParseError("action missing name", line, col)
    name = _sym(body[0])
    params = []
    precondition = ([], [])
    effect = ([], [])
    i = 1
    seen_effect = False
    while i < len(body):
        key = _sym(body[i])
        if i + 1 >= len(body):
            raise ParseError(f"missing value for {key} in action '{name}'", line, col)
        value = body[i + 1]
        if key == ":parameters":
            if not _is_list(value):
                raise ParseError(":parameters must be a list", line, col)
            params = _parse_typed_list(value[1], ":parameters", line, col)
            for _, tname in params:
                if tname not in builder.types:
                    raise ParseError(f"undeclared type '{tname}'", line, col)
        elif key == ":precondition":
            bound = {var: t for var, t in params}
            precondition = _read_condition(value, builder, bound, allow_not=False)
        elif key == ":effect":
            bound = {var: t for var, t in params}
            effect = _read_condition(value, builder, bound, allow_not=True)
            seen_effect = True
        else:
            raise ParseError(f"unknown action key '{key}'", line, col)
        i += 2
    if not seen_effect:
        raise ParseError(f"action '{name}' has no :effect", line, col)
    builder.schemas.append(
        ActionSchema(
            name=name,
            params=params,
            precondition=precondition[0],
            add=effect[0],
            delete=effect[1],
        )
    )


def _parse_problem(node, builder):
    line, col = _node_pos(node)
    items = node[1]
    if len(items) < 2 or _sym(items[0]) != "define":
        raise ParseError("expected (define (problem ...) ...)", line, col)
    head = items[1]
    if not _is_list(head) or len(head[1]) != 2 or _sym(head[1][0]) != "problem":
        raise ParseError("expected (problem NAME)", line, col)

    init = []
    goal = []
    for section in items[2:]:
        sline, scol = _node_pos(section)
        if not _is_list(section) or not section[1]:
            raise ParseError("expected a problem section", sline, scol)
        key = _sym(section[1][0])
        body = section[1][1:]
        if key == ":domain":
            dname = _sym(body[0])
            if dname != builder.domain_name:
                raise ParseError(
                    f"problem references domain '{dname}', "
                    f"expected '{builder.domain_name}'",
                    sline,
                    scol,
                )
        elif key == ":objects":
            for name, tname in _parse_typed_list(body, ":objects", sline, scol):
                if tname not in builder.types:
                    raise ParseError(f"undeclared type '{tname}'", sline, scol)
                builder.objects[name] = tname
        elif key == ":init":
            for anode in body:
                atom, aline, acol = _read_atom(anode)
                builder.check_atom(atom, aline, acol, GROUND)
                init.append(atom)
        elif key == ":goal":
            if len(body) != 1:
                raise ParseError(":goal takes one condition", sline, scol)
            pos, neg = _read_condition(body[0], builder, GROUND, allow_not=False)
            goal.extend(pos)
        else:
            raise ParseError(f"unknown problem section '{key}'", sline, scol)
    return init, goal


def parse(domain_text, problem_text, strict=False):
    """Parse domain and problem texts into a LiftedTask.

    Raises ParseError with line/column on syntax errors, undeclared
    names (strict mode) and arity mismatches (both modes).
    """
    dreader = _Reader(domain_text)
    dnode = dreader.read()
    if not dreader.at_end():
        extra = dreader._peek()
        raise ParseError("trailing input after domain", extra[1], extra[2])

    builder = _TaskBuilder(strict)
    _parse_domain(dnode, builder)

    preader = _Reader(problem_text)
    pnode = preader.read()
    if not preader.at_end():
        extra = preader._peek()
        raise ParseError("trailing input after problem", extra[1], extra[2])
    init, goal = _parse_problem(pnode, builder)

    if not goal:
        raise ParseError("empty goal", 1, 1)

    return LiftedTask(
        domain_name=builder.domain_name,
        types=builder.types,
        objects=builder.objects,
        predicates=builder.predicates,
        action_schemas=builder.schemas,
        init=init,
        goal=goal,
        warnings=builder.warnings,
    )

import argparse, decimal, json, logging, sys, time
from fractions import Fraction

import relbnlib
from relbnlib.cnf import count_one_in_three
from relbnlib.edgecover import ClassBCounter

logger = logging.getLogger("relbn")


def read_text(path):
  f = open(path, "r")
  content = f.read()
  f.close()
  return content


def write_output(text, path):
  if path:
    f = open(path, "w")
    f.write(text)
    f.close()
  else:
    sys.stdout.write(text)


def format_decimal(value):
  """12 significant digits, round half even."""
  value = Fraction(value)
  context = decimal.Context(prec=relbnlib.DECIMAL_DIGITS, rounding=decimal.ROUND_HALF_EVEN)
  d = context.divide(decimal.Decimal(value.numerator), decimal.Decimal(value.denominator))
  if d == 0:
    return format(decimal.Decimal(0).quantize(decimal.Decimal(1).scaleb(1 - relbnlib.DECIMAL_DIGITS)),
                  "f")
  exponent = d.adjusted() - (relbnlib.DECIMAL_DIGITS - 1)
  return format(d.quantize(decimal.Decimal(1).scaleb(exponent), context=context), "f")


def format_value(value):
  return f"{value} ({format_decimal(value)})"


def make_config(args):
  return relbnlib.InferenceConfig.from_env(root_cap=getattr(args, "root_cap", None),
                                           node_cap=getattr(args, "node_cap", None),
                                           edge_cap=getattr(args, "edge_cap", None),
                                           engine=getattr(args, "engine", None))


##### infer #####


def cmd_infer(args):
  config = make_config(args)
  spec = relbnlib.parse_spec(read_text(args.spec))
  relbnlib.validate_spec(spec).raise_if_invalid()
  query = relbnlib.parse_query(args.query)
  if query.gamma is not None:
    relbnlib.check_gamma(query.gamma)

  started = time.perf_counter()
  result = relbnlib.EngineFactory(config.engine, config).run(spec, args.n, query)
  elapsed = (time.perf_counter() - started) * 1000 if args.timing else None
  decision = result.decision(query.gamma)

  if args.format == "json-lines":
    print(json.dumps({
      "engine": result.engine,
      "value_num": result.value.numerator,
      "value_den": result.value.denominator,
      "decision": decision,
      "calls": result.calls,
      "elapsed_ms": None if elapsed is None else round(elapsed, 3),
    }))
    return relbnlib.EXIT_OK

  if decision is None:
    print(format_value(result.value))
  else:
    print(f"{result.value} > {query.gamma} : {str(decision).lower()}")
  print(f"engine: {result.engine}")
  if elapsed is not None:
    print(f"elapsed_ms: {elapsed:.3f}")
  return relbnlib.EXIT_OK


##### count #####


def load_graph(args):
  if args.classB:
    return relbnlib.ClassBGraph(*args.classB)
  return relbnlib.parse_bwg(read_text(args.graph))


def cmd_count(args):
  config = make_config(args)
  g = load_graph(args)
  lam = Fraction(args.lam) if args.lam is not None else None
  counter = ClassBCounter(2 if lam is None else 1 + lam)

  if lam is None:
    value = relbnlib.count_covers(g, config, counter)
    print(value)
  else:
    value = relbnlib.partition_function(g, lam, config, counter)
    print(format_value(value))

  if args.calls:
    if isinstance(g, relbnlib.ClassBGraph):
      print(f"calls: {counter.calls} (bound {g.call_bound()})")
    else:
      print(f"calls: {counter.calls}")

  if args.oracle:
    plain = g.to_bwgraph() if isinstance(g, relbnlib.ClassBGraph) else g
    if len(plain.edges) > config.edge_cap:
      logger.warning("oracle skipped: %d edges exceed cap %d", len(plain.edges), config.edge_cap)
    else:
      if lam is None:
        expected = relbnlib.count_covers_bruteforce(plain, config)
      else:
        expected = relbnlib.partition_function_bruteforce(plain, lam, config)
      if expected != value:
        print(f"oracle mismatch: brute force gives {expected}", file=sys.stderr)
        return relbnlib.EXIT_INVALID
      print("oracle: ok")
  return relbnlib.EXIT_OK


##### encode #####


def encode_plate(args, config):
  spec = relbnlib.parse_plate(read_text(args.inputs[0]))
  spec = relbnlib.plate_to_spec(spec)
  if args.verify:
    relbnlib.validate_spec(spec).raise_if_invalid()
    print(f"verify: {relbnlib.classify_fragment(spec, config)}", file=sys.stderr)
  return relbnlib.render_spec(spec)


def encode_prm(args, config):
  if not args.skeleton:
    raise relbnlib.ParameterError("prm encoding needs --skeleton")
  prm = relbnlib.parse_prm(read_text(args.inputs[0]))
  skeleton = relbnlib.parse_skeleton(read_text(args.skeleton))
  encoding = relbnlib.prm_to_spec(prm, skeleton)
  if args.verify:
    relbnlib.validate_spec(encoding.spec).raise_if_invalid()
    print("verify: ok", file=sys.stderr)
  evidence = relbnlib.render_assignment(dict(encoding.evidence))
  return (relbnlib.render_spec(encoding.spec) + f"# domain {encoding.domain_size}\n" +
          f"# evidence {evidence}\n")


def encode_gadget(args, config):
  cnf = relbnlib.parse_dimacs(read_text(args.inputs[0]))
  gadget = relbnlib.one_in_three_gadget(cnf)
  if args.verify:
    models, exact_one = relbnlib.count_models(cnf), count_one_in_three(gadget)
    if models != exact_one:
      raise relbnlib.EncodeError(f"gadget check failed: {models} models, {exact_one} 1-in-3")
    print(f"verify: {models} = {exact_one}", file=sys.stderr)
  return relbnlib.render_dimacs(gadget)


def encode_matrix(args, config):
  try:
    m, n, rows, cols = (int(x) for x in args.inputs)
  except ValueError:
    raise relbnlib.ParameterError("matrix encoding needs four integers m n M N")
  cnf = relbnlib.matrix_problem_to_formula(m, n, rows, cols)
  graph = relbnlib.linmoncbpc_to_bwgraph(cnf)
  if args.verify:
    counts = {relbnlib.count_models(cnf), relbnlib.count_covers(graph, config)}
    if rows * cols <= config.root_cap:
      counts.add(relbnlib.matrix_count_bruteforce(m, n, rows, cols))
    if len(counts) != 1:
      raise relbnlib.EncodeError(f"matrix counts disagree: {sorted(counts)}")
    print(f"verify: {counts.pop()}", file=sys.stderr)
  return relbnlib.render_bwg(graph) if args.to == "bwg" else relbnlib.render_dimacs(cnf)


def encode_linmon(args, config):
  cnf = relbnlib.parse_dimacs(read_text(args.inputs[0]))
  graph = relbnlib.linmoncbpc_to_bwgraph(cnf)
  if args.verify:
    models, covers = relbnlib.count_models(cnf), relbnlib.count_covers(graph, config)
    if models != covers:
      raise relbnlib.EncodeError(f"{models} models but {covers} covers")
    print(f"verify: {models}", file=sys.stderr)
  return relbnlib.render_bwg(graph)


ENCODERS = {
  "plate": encode_plate,
  "prm": encode_prm,
  "gadget": encode_gadget,
  "matrix": encode_matrix,
  "linmon": encode_linmon,
}


def cmd_encode(args):
  config = make_config(args)
  if not args.inputs:
    raise relbnlib.ParameterError(f"{args.kind} encoding needs an input")
  write_output(ENCODERS[args.kind](args, config), args.output)
  return relbnlib.EXIT_OK


##### ground / classify / mpe / sample #####


def cmd_ground(args):
  config = make_config(args)
  spec = relbnlib.parse_spec(read_text(args.spec))
  write_output(relbnlib.render_network(relbnlib.ground_spec(spec, args.n, config)), args.output)
  return relbnlib.EXIT_OK


def cmd_classify(args):
  config = make_config(args)
  spec = relbnlib.parse_spec(read_text(args.spec))
  relbnlib.validate_spec(spec).raise_if_invalid()
  print(relbnlib.classify_fragment(spec, config))
  return relbnlib.EXIT_OK


def cmd_mpe(args):
  config = make_config(args)
  spec = relbnlib.parse_spec(read_text(args.spec))
  relbnlib.validate_spec(spec).raise_if_invalid()
  evidence = relbnlib.parse_query(args.evidence).literals() if args.evidence else {}
  result = relbnlib.mpe(spec, args.n, evidence, config)
  print(relbnlib.render_assignment(dict(result.assignment)))
  print(format_value(result.probability))
  if not result.consistent:
    print("evidence is inconsistent")
  return relbnlib.EXIT_OK


def cmd_sample(args):
  g = load_graph(args)
  if isinstance(g, relbnlib.ClassBGraph):
    g = g.to_bwgraph()
  hits = {e: 0 for e in g.edges}
  state = frozenset(g.edges)
  for state in relbnlib.glauber_chain(g, Fraction(args.lam), args.steps, args.seed):
    for e in state:
      hits[e] += 1
  final = state if args.steps else frozenset(g.edges)
  print("cover: " + ", ".join(f"{u}-{v}" for u, v in sorted(final, key=str)))
  for (u, v), count in hits.items():
    frequency = Fraction(count, args.steps) if args.steps else Fraction(1)
    print(f"{u}-{v} {format_decimal(frequency)}")
  return relbnlib.EXIT_OK


##### Argument parsing #####


def build_parser():
  parser = argparse.ArgumentParser(description="relbn - exact inference for relational Bayesian networks")
  parser.add_argument("--verbose", action="store_true", help="Log decisions to stderr")
  commands = parser.add_subparsers(dest="command", required=True)

  def with_caps(p):
    p.add_argument("--root-cap", type=int, default=None, help="Most roots enumerated")
    p.add_argument("--node-cap", type=int, default=None, help="Most ground nodes")
    p.add_argument("--edge-cap", type=int, default=None, help="Most edges for brute force")
    return p

  p = with_caps(commands.add_parser("infer", help="P(Q|E), or the decision P(Q|E) > gamma"))
  p.add_argument("--spec", required=True, help=".rbn specification")
  p.add_argument("--n", type=int, required=True, help="Domain size")
  p.add_argument("--query", required=True, help="Q | E ; gamma=p/q")
  p.add_argument("--engine", choices=relbnlib.ENGINE_NAMES, default=None)
  p.add_argument("--format", choices=["text", "json-lines"], default="text")
  p.add_argument("--timing", action="store_true", help="Report elapsed milliseconds")
  p.set_defaults(handler=cmd_infer)

  def with_graph(p):
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", help=".bwg graph")
    source.add_argument("--classB", type=int, nargs=4, metavar=("K1", "M", "N", "K2"))
    return p

  p = with_caps(with_graph(commands.add_parser("count", help="Edge covers or Z(G, lambda)")))
  p.add_argument("--lambda", dest="lam", default=None, help="Edge weight, a rational")
  p.add_argument("--calls", action="store_true", help="Report recursion calls")
  p.add_argument("--oracle", action="store_true", help="Cross-check against brute force")
  p.set_defaults(handler=cmd_count)

  p = with_caps(commands.add_parser("encode", help="Run an encoder"))
  p.add_argument("kind", choices=sorted(ENCODERS))
  p.add_argument("inputs", nargs="*", help="Input file, or m n M N for matrix")
  p.add_argument("--skeleton", help=".skel file for prm")
  p.add_argument("--to", choices=["cnf", "bwg"], default="cnf", help="matrix output")
  p.add_argument("--verify", action="store_true", help="Run the faithfulness check")
  p.add_argument("-o", "--output", help="Output file (default stdout)")
  p.set_defaults(handler=cmd_encode)

  p = with_caps(commands.add_parser("ground", help="Print the ground network (.gbn)"))
  p.add_argument("--spec", required=True)
  p.add_argument("--n", type=int, required=True)
  p.add_argument("-o", "--output")
  p.set_defaults(handler=cmd_ground)

  p = commands.add_parser("classify", help="Print the fragment label")
  p.add_argument("--spec", required=True)
  p.set_defaults(handler=cmd_classify)

  p = with_caps(commands.add_parser("mpe", help="Most probable explanation (DL-Lite)"))
  p.add_argument("--spec", required=True)
  p.add_argument("--n", type=int, required=True)
  p.add_argument("--evidence", default="", help="Positive literals")
  p.set_defaults(handler=cmd_mpe)

  p = with_graph(commands.add_parser("sample", help="Glauber dynamics over edge covers"))
  p.add_argument("--lambda", dest="lam", default="1")
  p.add_argument("--steps", type=int, default=1000)
  p.add_argument("--seed", type=int, default=0)
  p.set_defaults(handler=cmd_sample)
  return parser


def main(argv=None):
  args = build_parser().parse_args(argv)
  logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
  try:
    return args.handler(args)
  except relbnlib.RelbnError as e:
    print(f"error: {e}", file=sys.stderr)
    return e.exit_code
  except (OSError, ValueError) as e:
    print(f"error: {e}", file=sys.stderr)
    return relbnlib.EXIT_INVALID


if __name__ == "__main__":
  sys.exit(main())

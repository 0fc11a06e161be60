"""Code-corpus transforms: fill-in-the-middle, repo ordering, QA append.

FIM teaches infilling: the file is cut at two random points and re-emitted
with labeled prefix/suffix/middle blocks.  Repository ordering rebuilds a
multi-file repo as a single document with dependencies first.  QA append
turns a document plus question/answer pairs into one training sample.
"""

import random

from corpusops.transforms import (
    FimConfig,
    RepoFile,
    append_qa,
    build_dep_graph,
    concat_repo,
    extract_imports,
    fim_transform,
    topo_order,
)

source = """def fib(n):
    if n < 2:
        return n
    return fib(n - 1) + fib(n - 2)
"""

print("=== fill in the middle ===")
out = fim_transform(source, FimConfig(), random.Random(3))
print(out)

print("=== repository topological ordering ===")
files = [
    RepoFile("app.py", "import engine\nimport config\n\nengine.run(config.load())\n"),
    RepoFile("engine.py", "import config\n\ndef run(cfg): ...\n"),
    RepoFile("config.py", "def load(): return {}\n"),
]
for f in files:
    print(f"  {f.path} imports {extract_imports(f)}")
graph = build_dep_graph(files)
order = topo_order(graph, [f.path for f in files])
print(f"  order: {order}")
by_path = {f.path: f for f in files}
print("\nconcatenated repo document:")
print(concat_repo([by_path[p] for p in order]))

print("=== QA append ===")
doc = "The capital of France is Paris. It sits on the Seine."
print(append_qa(doc, [("What is the capital of France?", "Paris."),
                      ("Which river runs through it?", "The Seine.")]))

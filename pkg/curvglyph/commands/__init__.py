from . import evaluate, extract, split_info, train, viz

COMMANDS = (extract, split_info, train, evaluate, viz)

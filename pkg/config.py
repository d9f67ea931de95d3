# Default settings for every command. A run config file (flat YAML) and
# command-line flags override these, in that order.


class Data_Config:
    SPLIT_RATIOS = (0.8, 0.1, 0.1)
    NEGATIVES_PER_POSITIVE = 2
    NEGATIVE_LABEL = 0.0


class Graph_Config:
    MODE = "all_pairs"  # or "pair_list"
    LOW_CARDINALITY_THRESHOLD = 10


class Model_Config:
    EMBEDDING_DIM = 256
    LAYERS = 1  # 0 = plain FM
    ACTIVATION = "identity"
    INIT_STD = 0.01


class Train_Config:
    OPTIMIZER = "adam"
    LEARNING_RATE = 0.001
    L2_LAMBDA = 1e-5
    DROPOUT_RATIO = 0.0
    INTERACTION_DROPOUT = 0.0
    BATCH_SIZE = 4096
    MAX_EPOCHS = 100
    PATIENCE = 5
    SAMPLING_RATIO = 1.0
    SEED = 2020
    METRIC_FOR_STOPPING = "rmse"
    REGULARIZE_BIAS = True
    FULL_DECAY = False

    # Search grids used in the experiments
    LEARNING_RATE_GRID = (0.001, 0.002, 0.005, 0.01)
    L2_GRID = (1e-3, 1e-4, 1e-5)
    DROPOUT_GRID = tuple(round(0.1 * i, 1) for i in range(10))


class Run_Config:
    THREADS = 1
    MODEL_PATH = "model.gemfm"
    REPORT_PATH = "run_report.txt"
    GRAPH_PATH = "graph.txt"
    PREDICTIONS_PATH = "predictions.txt"

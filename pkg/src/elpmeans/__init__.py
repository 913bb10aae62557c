"""Community detection by Laplacian centrality decision graphs over DeepWalk embeddings."""
